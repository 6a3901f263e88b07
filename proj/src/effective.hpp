#pragma once
#include <string>
#include <vector>

#include "contraction.hpp"
#include "json.hpp"
#include "model.hpp"

namespace stcg {

struct DissipatorTermSpec {
    ScalarExpr rate;  // gamma in  d rho/dt = ... + gamma e^{-i freq t} (L rho J - {J L, rho}/2)
    OpKey L;
    OpKey J;
    FreqExpr freq;
};

struct EffectiveModel {
    int order = 0;
    ModeTablePtr modes;
    std::vector<SymbolDecl> symbols;
    FilterSpec filter;
    std::vector<HamiltonianTermSpec> hamiltonian;  // one canonical monomial per entry
    std::vector<DissipatorTermSpec> dissipators;
    nlohmann::json provenance = nlohmann::json::object();

    Assignment values() const;
    bool equals(const EffectiveModel& o) const;
};

// Which mirrored coefficient is subtracted in the dissipator rate.
enum class DissipatorConvention { Plain, Reversed };

struct DeriveOptions {
    int order = 1;
    bool hamiltonian = true;
    bool dissipators = true;
    bool ir_limit = false;
    DissipatorConvention convention = DissipatorConvention::Plain;
    bool keep_regulator = false;  // skip the ramp limit and leave delta_shift in place
    bool drop_numeric_zeros = true;
    int workers = 0;  // 0: STCG_WORKERS or hardware concurrency
};

EffectiveModel derive(const ModelSpec& model, const DeriveOptions& opts);
std::vector<HamiltonianTermSpec> effective_hamiltonian(const ModelSpec& model, int k, const DeriveOptions& base = {});
std::vector<DissipatorTermSpec> effective_dissipators(const ModelSpec& model, int k, const DeriveOptions& base = {});

// Raw order-k contraction terms C * L rho J e^{-i freq t} of the Liouvillian before the
// Hamiltonian/dissipator split; used to cross-check the split numerically.
struct ContractionTerm {
    ScalarExpr coeff;
    OperatorSum L;
    OperatorSum J;
    FreqExpr freq;
};
std::vector<ContractionTerm> contraction_terms(const ModelSpec& model, int k);

// Symbolic regulator limit: series in delta_shift times e^{-i m delta t}, keeping delta^0.
ScalarExpr regulator_limit(const std::vector<std::pair<ScalarExpr, Rational>>& parts, const std::string& what);

// Numeric fallback: Richardson extrapolation of the regulated sum at delta = h, h/2, h/4.
std::complex<double> numeric_regulator_limit(const std::vector<std::pair<ScalarExpr, Rational>>& parts,
                                             Assignment assign, const FilterSpec& filter, double h = 1e-2);

struct PruneCensus {
    int kept_h = 0, dropped_h = 0, kept_d = 0, dropped_d = 0;
};
EffectiveModel prune_terms(const EffectiveModel& eff, double threshold, const Assignment& assign, double t0 = 0,
                           double t1 = 0, PruneCensus* census = nullptr);

// Exact symbolic closure of both term sets under their conjugation pairings.
bool hermiticity_closed(const EffectiveModel& eff, std::string* why = nullptr);

nlohmann::json export_json(const EffectiveModel& eff);
std::string export_text(const EffectiveModel& eff);
EffectiveModel import_json(const nlohmann::json& doc);

int default_workers();

}  // namespace stcg
