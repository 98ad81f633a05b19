#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "curvglue/lambda2.hpp"

namespace curvglue {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  int line_, column_;
};

// Arithmetic expression over x1..xn (and the alias xn for the last
// coordinate), evaluated by walking the syntax tree.
class Expression {
 public:
  struct Node;

  Expression() = default;
  double operator()(const Vec& x) const;
  // Canonical fully parenthesized text; parsing it yields the same tree.
  std::string print() const;
  // Largest variable index referenced (1-based), 0 if none.
  int max_variable() const;

  friend Expression parse_expression(std::string_view text, int n, int line, int column);

 private:
  std::shared_ptr<const Node> root_;
};

// n is the number of coordinates; line and column locate text in a larger file.
Expression parse_expression(std::string_view text, int n, int line = 1, int column = 1);

}  // namespace curvglue
