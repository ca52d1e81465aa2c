#pragma once

#include <memory>
#include <string>

#include "subkernel/errors.hpp"

namespace subkernel {

/// Arithmetic expressions in one variable `t` with +, -, *, /, ^, exp, log.
/// Used for user-supplied Levy densities in JSON configs.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double eval(double t) const;
  const std::string& text() const { return text_; }

  Expression() = default;
  bool empty() const { return !root_; }

 private:
  struct Node;
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace subkernel
