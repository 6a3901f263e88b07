#pragma once
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "effective.hpp"

namespace stcg::testing {

using cd = std::complex<double>;
using nlohmann::json;

// Dense realization helpers for Liouvillian comparisons.
inline Eigen::MatrixXcd mat(const ModeTable& mt, const OpKey& k) { return key_matrix(mt, k); }

inline Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0, 1);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cd(N(rng), N(rng));
    return (m + m.adjoint()) / 2.0;
}

inline Eigen::MatrixXcd assembled_rhs(const EffectiveModel& e, const Assignment& a, double t, const Eigen::MatrixXcd& rho) {
    Assignment at = a;
    at.set(sym_t(), t);
    const ModeTable& mt = *e.modes;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (const auto& h : e.hamiltonian) {
        cd c = h.coeff.eval(at, &e.filter) * std::exp(cd(0, -1) * h.freq.eval(at) * t);
        H += c * mat(mt, h.op.terms().begin()->first);
    }
    Eigen::MatrixXcd out = cd(0, -1) * (H * rho - rho * H);
    for (const auto& d : e.dissipators) {
        cd c = d.rate.eval(at, &e.filter) * std::exp(cd(0, -1) * d.freq.eval(at) * t);
        Eigen::MatrixXcd L = mat(mt, d.L), J = mat(mt, d.J);
        Eigen::MatrixXcd JL = J * L;
        out += c * (L * rho * J - 0.5 * (JL * rho + rho * JL));
    }
    return out;
}

// -i sum_k L_k rho with L_k rho = sum C h..h rho h..h - h.c.
inline Eigen::MatrixXcd direct_rhs(const ModelSpec& m, int order, const Assignment& a, double t, const Eigen::MatrixXcd& rho) {
    Assignment at = a;
    at.set(sym_t(), t);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (int k = 1; k <= order; ++k)
        for (const auto& term : contraction_terms(m, k)) {
            cd c = term.coeff.eval(at, &m.filter) * std::exp(cd(0, -1) * term.freq.eval(at) * t);
            W += c * matrix_realization(term.L, at, &m.filter) * rho * matrix_realization(term.J, at, &m.filter);
        }
    return cd(0, -1) * (W - W.adjoint());
}

// Two TLS modes, up to three term pairs at integer multiples of one frequency symbol.
inline json random_tls_model(std::mt19937_64& rng, int pairs) {
    static const char* ops[] = {"q1.sp", "q1.sm", "q1.sz", "q2.sp", "q2.sm", "q1.sp*q2.sm", "q1.sz*q2.sp", "q1.sp*q2.sp"};
    std::uniform_int_distribution<int> pick(0, 7), mult(-3, 3);
    json doc;
    doc["modes"] = {{{"name", "q1"}, {"kind", "tls"}}, {{"name", "q2"}, {"kind", "tls"}}};
    doc["symbols"] = {{{"name", "w0"}}};
    doc["filter"] = {{"kind", "gaussian"}};
    doc["autocomplete"] = true;
    doc["terms"] = json::array();
    for (int i = 0; i < pairs; ++i) {
        std::string c = "c" + std::to_string(i + 1);
        doc["symbols"].push_back({{"name", c}, {"complex", true}});
        int n = mult(rng);
        while (n == 0) n = mult(rng);
        doc["terms"].push_back({{"coupling", c}, {"frequency", std::to_string(n) + "*w0"}, {"operator", ops[pick(rng)]}});
    }
    return doc;
}

inline Assignment tls_assign(int pairs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1), w(0.5, 1.5), tau(0.3, 1.2);
    Assignment a;
    a.set("w0", w(rng));
    for (int i = 0; i < pairs; ++i) a.set("c" + std::to_string(i + 1), cd(u(rng), u(rng)));
    a.set(sym_tau(), tau(rng));
    return a;
}

inline double liouvillian_mismatch(const ModelSpec& m, const EffectiveModel& e, int order, std::mt19937_64& rng,
                            double* trace = nullptr, int points = 3) {
    int pairs = 0;
    for (const auto& s : m.symbols) pairs += s.complex;
    double worst = 0;
    for (int p = 0; p < points; ++p) {
        Assignment a = tls_assign(pairs, rng);
        Eigen::MatrixXcd rho = random_hermitian(4, rng);
        double t = std::uniform_real_distribution<double>(-2, 2)(rng);
        Eigen::MatrixXcd d = direct_rhs(m, order, a, t, rho);
        Eigen::MatrixXcd s = assembled_rhs(e, a, t, rho);
        double scale = std::max(d.norm(), 1e-12);
        worst = std::max(worst, (d - s).norm() / scale);
        if (trace) *trace = std::max(*trace, std::abs(d.trace()) / rho.norm());
    }
    return worst;
}

}  // namespace stcg::testing
