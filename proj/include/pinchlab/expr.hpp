#ifndef PINCHLAB_EXPR_HPP
#define PINCHLAB_EXPR_HPP

#include <string>

#include "pinchlab/quadext.hpp"

namespace pinchlab {

// Parse "expr" over +, -, *, /, ^ (integer exponents), sqrt(), decimal and
// fractional literals, and identifiers (auto-interned). The result lives in at
// most one quadratic extension; nested radicals raise ExprError. Printing via
// the .str() methods round-trips through this parser.
QuadExt parse_scalar(const std::string& text);

// Downcasts with diagnostics.
RatFunc require_ratfunc(const QuadExt& v, const std::string& what);
Poly require_poly(const QuadExt& v, const std::string& what);
Rational parse_rational(const std::string& text); // constants only

} // namespace pinchlab

#endif
