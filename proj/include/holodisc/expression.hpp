#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "holodisc/types.hpp"

namespace holodisc {

/// A parsed complex-valued arithmetic expression.
///
/// Grammar (whitespace ignored):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'i' | 'pi' | name | name '(' expr (',' expr)* ')' | '(' expr ')'
/// Functions: exp log sqrt sin cos conj re im abs arg pow. Logarithms and
/// powers use the principal branch.
class Expression {
public:
  Expression() = default;

  /// Parses text with the given variable names. line/column_offset locate
  /// the text inside a larger file for error reporting.
  static Expression parse(std::string_view text, std::vector<std::string> variables,
                          int line = 1, int column_offset = 0);

  cplx evaluate(std::span<const cplx> values) const;

  const std::vector<std::string>& variables() const { return variables_; }
  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  std::vector<std::string> variables_;
  std::string source_;
};

/// Variable names for a function of z in C^n:
/// z1..zn, zb1..zbn (conjugates), x1..xn, y1..yn.
std::vector<std::string> coordinate_variables(int n);

/// Binds the values listed by coordinate_variables for the point z.
std::vector<cplx> coordinate_values(const CVector& z);

} // namespace holodisc
