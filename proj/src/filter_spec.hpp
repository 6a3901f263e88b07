#pragma once
#include <optional>
#include <utility>
#include <vector>

namespace stcg {

enum class FilterKind { Gaussian, CustomTable };

struct FilterSpec {
    FilterKind kind = FilterKind::Gaussian;
    std::optional<double> tau;                       // seconds; symbol "tau" when absent
    std::vector<std::pair<double, double>> table;    // (omega, f) sorted by omega

    // Numeric filter value. Gaussian uses the given tau.
    double eval(double omega, double tau_value) const;
};

}  // namespace stcg
