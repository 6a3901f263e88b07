#pragma once
#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "scalar.hpp"

namespace stcg {

enum class ModeKind { Boson, TwoLevel };

struct ModeSpec {
    std::string name;
    ModeKind kind = ModeKind::Boson;
    int truncation = 2;  // levels retained; always 2 for a two-level mode
    int dim() const { return kind == ModeKind::Boson ? truncation : 2; }
};

// Modes in declaration order plus algebra limits.
class ModeTable {
public:
    explicit ModeTable(std::vector<ModeSpec> modes, int degree_cap = 12);
    const std::vector<ModeSpec>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }
    int index_of(const std::string& name) const;  // -1 if absent
    int degree_cap() const { return degree_cap_; }
    int two_level_count() const { return tls_count_; }
    long dimension() const;
    bool operator==(const ModeTable& o) const;

private:
    std::vector<ModeSpec> modes_;
    int degree_cap_;
    int tls_count_ = 0;
};

using ModeTablePtr = std::shared_ptr<const ModeTable>;

// Two-level basis: identity, sigma_z, sigma_+, sigma_-.
enum Pauli : int { kId = 0, kSz = 1, kSp = 2, kSm = 3 };

// Per-mode factor: bosonic a'^first a^second, or (pauli, 0) for a two-level mode.
using ModeFactor = std::pair<int, int>;
using OpKey = std::vector<ModeFactor>;

class OperatorSum {
public:
    using TermMap = std::map<OpKey, ScalarExpr>;

    OperatorSum() = default;
    explicit OperatorSum(ModeTablePtr modes) : modes_(std::move(modes)) {}
    static OperatorSum identity(ModeTablePtr modes, const ScalarExpr& c = ScalarExpr(1));
    static OperatorSum monomial(ModeTablePtr modes, const OpKey& key, const ScalarExpr& c = ScalarExpr(1));

    const ModeTablePtr& modes() const { return modes_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    ScalarExpr coefficient(const OpKey& key) const;

    void add(const OpKey& key, const ScalarExpr& c);
    OperatorSum operator+(const OperatorSum& o) const;
    OperatorSum operator-(const OperatorSum& o) const;
    OperatorSum scaled(const ScalarExpr& c) const;
    OperatorSum adjoint() const;
    bool equals(const OperatorSum& o) const;

    std::string str(RenderStyle style = RenderStyle::Parse) const;

private:
    ModeTablePtr modes_;
    TermMap terms_;
};

OpKey identity_key(const ModeTable& modes);
bool is_identity_key(const OpKey& k);
int key_degree(const ModeTable& modes, const OpKey& k);
OpKey adjoint_key(const ModeTable& modes, const OpKey& k);
std::string key_str(const ModeTable& modes, const OpKey& k);

// Product of two canonical monomials as a sum of canonical monomials with rational weights.
std::vector<std::pair<OpKey, Rational>> multiply_keys(const ModeTable& modes, const OpKey& x, const OpKey& y);

OperatorSum multiply(const OperatorSum& x, const OperatorSum& y);

// Grammar: factors joined by '*'. Bosonic factor: mode name, optional ' and ^n.
// Two-level factor: sz, sp, sm, t(i,j) with i,j in {g,e,0,1}; prefix "name." when several
// two-level modes exist. "1" denotes the identity.
OperatorSum parse_operator(const std::string& text, const ModeTablePtr& modes);

// Dense matrix of a single canonical monomial; first mode is the most significant Kronecker factor.
Eigen::MatrixXcd key_matrix(const ModeTable& modes, const OpKey& k);
Eigen::MatrixXcd matrix_realization(const OperatorSum& x, const Assignment& assign, const FilterSpec* filter = nullptr);

// Configured cap on the total Hilbert-space dimension for dense realization.
long& dimension_cap();

}  // namespace stcg
