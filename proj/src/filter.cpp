#include "filter.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace stcg {

double FilterSpec::eval(double omega, double tau_value) const {
    if (kind == FilterKind::Gaussian) return std::exp(-omega * omega * tau_value * tau_value / 2.0);
    if (table.empty()) fail(ErrorKind::Validation, "empty filter table");
    if (omega < table.front().first || omega > table.back().first)
        fail(ErrorKind::Range, "filter queried at " + std::to_string(omega) + " outside tabulated range [" +
                                   std::to_string(table.front().first) + ", " +
                                   std::to_string(table.back().first) + "]");
    auto hi = std::lower_bound(table.begin(), table.end(), omega,
                               [](const auto& p, double w) { return p.first < w; });
    if (hi->first == omega) return hi->second;
    auto lo = hi - 1;
    double s = (omega - lo->first) / (hi->first - lo->first);
    return lo->second + s * (hi->second - lo->second);
}

FilterSpec gaussian_filter(std::optional<double> tau) {
    if (tau && !(*tau >= 0)) fail(ErrorKind::Validation, "filter tau must be non-negative");
    FilterSpec f;
    f.kind = FilterKind::Gaussian;
    f.tau = tau;
    return f;
}

FilterSpec table_filter(std::vector<std::pair<double, double>> table) {
    if (table.size() < 2) fail(ErrorKind::Validation, "filter table needs at least two samples");
    std::sort(table.begin(), table.end());
    for (std::size_t i = 1; i < table.size(); ++i)
        if (table[i].first == table[i - 1].first) fail(ErrorKind::Validation, "duplicate filter table abscissa");
    FilterSpec f;
    f.kind = FilterKind::CustomTable;
    f.table = std::move(table);
    double f0 = f.eval(0.0, 0.0);
    if (f0 == 0) fail(ErrorKind::Validation, "filter table vanishes at zero frequency");
    for (auto& p : f.table) p.second /= f0;
    return f;
}

ScalarExpr filter_eval(const FilterSpec& spec, const FreqExpr& freq) { return ScalarExpr::filter(spec.kind, freq); }

double filter_eval(const FilterSpec& spec, double omega, double tau) { return spec.eval(omega, tau); }

}  // namespace stcg
