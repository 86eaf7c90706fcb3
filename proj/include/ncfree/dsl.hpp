#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ncfree/expr.hpp"

namespace ncfree {

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses the expression grammar
///   expr   := ["-"] term (("+"|"-") term)*
///   term   := factor ("*" factor)*
///   factor := atom ("'")*
///   atom   := scalar | letter | "exp" "(" "i" [real] expr ")" | "(" expr ")"
///   letter := ("X"|"A") integer
///   scalar := decimal | "(" decimal ("+"|"-") decimal "i" ")"
/// Throws ParseError, ArityError or NotSelfAdjointError.
NcExpr parse(std::string_view text, int d, int q);

/// Canonical rendering; parse(to_text(e), e.d(), e.q()) == e. Throws for
/// atoms whose scale depends on quadrature variables.
std::string to_text(const NcExpr& e);
std::string to_text(const Word& w);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace ncfree
