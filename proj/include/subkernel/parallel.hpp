#pragma once

#include <functional>

namespace subkernel {

/// Worker count for center-parallel loops (1 = fully sequential).
void set_threads(int n);
int get_threads();

/// Runs fn(0..n-1); outputs must be disjoint per index. Chunk boundaries do
/// not affect results, so reports stay byte-identical for any thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace subkernel
