#pragma once
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "effective.hpp"

namespace stcg {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

struct Observable {
    std::string label;
    OperatorSum op;
};

// Weighted sum of operator monomials, e.g. "sp*sm", "0.5*a + 0.5*a'", "-i*a + i*a'".
Observable parse_observable(const std::string& label, const std::string& text, const ModeTablePtr& modes);

// Initial state: one factor per mode in declaration order joined by '*' or ','.
// Factors: fock(n), coherent(alpha) with alpha like 2, -0.48i or 1+2i, g, e.
DenseMatrix parse_initial_state(const std::string& text, const ModeTable& modes);

enum class GuardPolicy { Warn, Abort };

struct IntegrateOptions {
    double t0 = 0, t1 = 0, dt = 0;  // dt = 0 selects the step rule
    int store_every = 0;             // 0 stores no states; n stores every n-th step
    std::vector<Observable> observables;
    double trace_tolerance = 1e-6;
    double top_level_guard = 1e-2;
    GuardPolicy policy = GuardPolicy::Abort;
};

struct Trajectory {
    std::vector<double> times;                    // observable sample times (every step)
    std::vector<std::vector<cplx>> series;        // one series per observable
    std::vector<std::string> labels;
    std::vector<double> state_times;
    std::vector<DenseMatrix> states;
    DenseMatrix final_state;
    nlohmann::json meta;
};

// Time-dependent generator compiled to numeric polynomials in t times e^{-i Omega t}.
class Generator {
public:
    static Generator exact(const ModelSpec& m, const Assignment& assign);
    static Generator tcg(const EffectiveModel& e, const Assignment& assign);

    DenseMatrix rhs(double t, const DenseMatrix& rho) const;
    DenseMatrix hamiltonian(double t) const;
    DenseMatrix dissipator(double t, const DenseMatrix& rho) const;
    // Fastest angular scale: largest term frequency plus a bound on the Hamiltonian norm.
    double fastest_rate() const;
    double max_frequency() const;
    long dimension() const { return dim_; }
    int continuity_limits() const { return continuity_limits_; }
    const ModeTable& modes() const { return *modes_; }
    bool has_dissipators() const { return !dis_.empty(); }

private:
    struct HTerm {
        std::vector<cplx> poly;
        double omega;
        SparseMatrix op;
    };
    struct DTerm {
        std::vector<cplx> poly;
        double omega;
        SparseMatrix L, J;
    };
    // Weighted sum of sparse members evaluated on their union pattern.
    struct Combo {
        SparseMatrix pattern;
        std::vector<int> coeff;                              // coefficient index per member
        std::vector<std::vector<std::pair<int, cplx>>> slots;  // per member: (value slot, entry)
        void build(const std::vector<std::pair<const SparseMatrix*, int>>& members, long dim);
        SparseMatrix eval(const std::vector<cplx>& c) const;
    };
    struct DGroup {
        SparseMatrix L;
        Combo Jt;
    };
    static cplx coefficient(const std::vector<cplx>& poly, double omega, double t);
    void finalize();
    std::vector<cplx> dissipator_coefficients(double t) const;
    ModeTablePtr modes_;
    long dim_ = 0;
    std::vector<HTerm> ham_;
    std::vector<DTerm> dis_;
    Combo h_sum_, k_sum_, kt_sum_;
    std::vector<DGroup> groups_;
    int continuity_limits_ = 0;
};

// Step rule: at least 40 steps per period of the fastest retained scale.
double step_rule(const Generator& g);

Trajectory integrate(const Generator& g, const DenseMatrix& rho0, const IntegrateOptions& opts);

// Gaussian-filtered exact state at t_center, starting from rho_start at t_center - 5 tau and
// integrating to t_center + 5 tau. Used as a pre-averaged TCG initial state.
DenseMatrix filtered_state(const Generator& exact, const DenseMatrix& rho_start, double t_center, double tau, double dt = 0);

cplx expectation(const SparseMatrix& op, const DenseMatrix& rho);
SparseMatrix sparse_realization(const OperatorSum& op, const Assignment& assign);

// Gaussian kernel of width tau truncated at +-5 tau and renormalized, applied on a uniform grid.
struct Series {
    std::vector<double> t;
    std::vector<cplx> v;
};
Series coarse_grain_series(const Series& s, double tau, double out_t0, double out_t1);
Trajectory coarse_grain_trajectory(const Trajectory& traj, const FilterSpec& filter, double out_t0, double out_t1);

struct Metrics {
    double rms = 0, max_abs = 0, normalized_rms = 0;
};
Metrics compare_series(const Series& ref, const Series& test);

struct RateSample {
    double t;
    double inert, dynam;
    bool degenerate;
};
// Ground-state population rates along a TCG trajectory with stored states.
std::vector<RateSample> rate_decomposition(const Generator& tcg, const Trajectory& traj, double gap_tolerance = 1e-9);

// CSV with a t column and one column per real series (re/im pairs when a series is complex).
std::string series_csv(const Trajectory& traj);
Trajectory read_series_csv(const std::string& text);

}  // namespace stcg
