#pragma once
#include "filter_spec.hpp"
#include "freq.hpp"
#include "scalar.hpp"

namespace stcg {

FilterSpec gaussian_filter(std::optional<double> tau = std::nullopt);
// Table is sorted and rescaled so f(0) = 1; 0 must lie inside the tabulated range.
FilterSpec table_filter(std::vector<std::pair<double, double>> table);

ScalarExpr filter_eval(const FilterSpec& spec, const FreqExpr& freq);
double filter_eval(const FilterSpec& spec, double omega, double tau);

}  // namespace stcg
