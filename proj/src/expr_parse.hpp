#pragma once
#include <functional>
#include <string>

#include "filter_spec.hpp"
#include "scalar.hpp"

namespace stcg {

// Grammar: sums, products, quotients and integer powers of numbers, the imaginary
// unit i, identifiers, conj(name), f(frequency) and parenthesized subexpressions.
// Division is allowed by a monomial, a linear frequency form or a constant.
ScalarExpr parse_scalar(const std::string& text, const SymbolResolver& resolve,
                        FilterKind filter_kind = FilterKind::Gaussian);

// Numeric quantity with optional unit suffixes, e.g. "2pi*2GHz", "0.2ns", "-58.4MHz", "1e9".
// Frequency units are plain cycles per second; a 2pi factor must be written explicitly.
double parse_quantity(const std::string& text);

}  // namespace stcg
