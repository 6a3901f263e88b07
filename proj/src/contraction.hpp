#pragma once
#include <complex>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "diagrams.hpp"
#include "filter.hpp"
#include "scalar.hpp"

namespace stcg {

struct FrequencyTuple {
    std::vector<FreqExpr> mu;
    std::vector<FreqExpr> nu;
    int l() const { return static_cast<int>(mu.size()); }
    int r() const { return static_cast<int>(nu.size()); }
    std::string key() const;
};

struct VectorFactorial {
    ScalarExpr value;               // product of partial sums (valid when zero_indices is empty)
    std::vector<int> zero_indices;  // 1-based positions of symbolically zero partial sums
    bool singular() const { return !zero_indices.empty(); }
};

VectorFactorial vector_factorial(const std::vector<FreqExpr>& v);

bool diagram_is_singular(const Diagram& d, const FrequencyTuple& t);
ScalarExpr diagram_contribution(const Diagram& d, const FrequencyTuple& t, const FilterSpec& filter);
// Finite part of the diagram under a uniform shift of every mode frequency by a regulator.
ScalarExpr regularize_singular(const Diagram& d, const FrequencyTuple& t, const FilterSpec& filter);

struct CoefficientResult {
    ScalarExpr value;
    bool singular_regularized = false;
};

struct ContractionOptions {
    // Drop monomials carrying a filter factor at a frequency that stays nonzero once
    // the listed regulator symbols are removed.
    bool ir_limit = false;
    std::vector<SymId> regulators;
};

bool ir_suppressed_atom(const Atom& a, const std::vector<SymId>& regulators);

CoefficientResult contraction_coefficient(const FrequencyTuple& t, const FilterSpec& filter,
                                          const ContractionOptions& opts = {});

// Thread-safe memo of contraction coefficients keyed by the exact tuple.
class ContractionCache {
public:
    ContractionCache(FilterSpec filter, ContractionOptions opts) : filter_(std::move(filter)), opts_(std::move(opts)) {}
    CoefficientResult get(const FrequencyTuple& t);
    std::size_t size() const;
    std::size_t hits() const { return hits_; }

private:
    FilterSpec filter_;
    ContractionOptions opts_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, CoefficientResult> memo_;
    std::size_t hits_ = 0;
};

enum class SymmetryRelation { Parity, Mirror };

// Both sides of the relation evaluated at random positive-tau, random-frequency points.
struct SymmetryReport {
    bool ok = true;
    double worst_rel_error = 0;
};
SymmetryReport symmetry_check(const FrequencyTuple& t, SymmetryRelation rel, const FilterSpec& filter, int samples,
                              std::mt19937_64& rng, double tol = 1e-10);

// Reference evaluation of W_{l,r}'s operator-product coefficient by explicit nested
// averages of Dyson integrals, diagram by diagram, for numeric frequencies.
struct OracleResult {
    std::complex<double> amplitude;
    bool homogeneous = false;
    double residual = 0;
};
// Throws OracleMismatch when the time dependence is not a single phasor within tol.
OracleResult bubble_factor_oracle(const std::vector<double>& mu, const std::vector<double>& nu,
                                  const FilterSpec& filter, double tau, const std::vector<double>& time_samples,
                                  double tol = 1e-9);

}  // namespace stcg
