#pragma once
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "operators.hpp"

namespace stcg {

struct SymbolDecl {
    std::string name;
    SymId id = 0;
    bool complex = false;
    std::optional<std::complex<double>> value;
    std::optional<FreqExpr> equals;  // frequency alias substituted at load time
};

struct HamiltonianTermSpec {
    ScalarExpr coeff;
    FreqExpr freq;
    OperatorSum op;
};

enum class RampProfile { Up, Down };

struct RampSpec {
    SymId symbol = 0;
    SymId duration = 0;
    RampProfile profile = RampProfile::Up;
    FreqExpr base_frequency;
};

struct ModelSpec {
    ModeTablePtr modes;
    std::vector<SymbolDecl> symbols;
    FilterSpec filter;
    std::vector<HamiltonianTermSpec> terms;
    std::vector<RampSpec> ramps;

    const SymbolDecl* find(const std::string& name) const;
    SymbolResolver resolver() const;            // declared symbols plus tau and t
    Assignment values() const;                  // numeric values of declared symbols and tau
    FreqExpr substitute_aliases(const FreqExpr& f) const;
};

struct LoadOptions {
    bool autocomplete = false;
};

ModelSpec load_model(const nlohmann::json& doc, const LoadOptions& opts = {});
ModelSpec load_model_file(const std::string& path, const LoadOptions& opts = {});
nlohmann::json model_to_json(const ModelSpec& m);

// Terms grouped by frequency: h_omega including couplings.
std::map<FreqExpr, OperatorSum> frequency_groups(const std::vector<HamiltonianTermSpec>& terms, const ModeTablePtr& modes);

// Each term has a conjugate partner (coeff*, op^dagger, -freq); exact check on grouped operators.
void check_hermiticity(const std::vector<HamiltonianTermSpec>& terms, const ModeTablePtr& modes);

// Replaces ramped couplings by their regulator-shifted encodings.
std::vector<HamiltonianTermSpec> encode_ramps(const ModelSpec& m);

// Numeric symbol values from a {name: value} document, units allowed in string values.
void apply_params(ModelSpec& m, const nlohmann::json& params);

std::complex<double> parse_value(const nlohmann::json& v, const std::string& what);

}  // namespace stcg
