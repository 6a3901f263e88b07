#include "simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <regex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "error.hpp"
#include "expr_parse.hpp"

namespace stcg {

namespace {

SymbolResolver no_symbols() {
    return [](const std::string& n) -> SymId { fail(ErrorKind::Parse, "unexpected symbol '" + n + "' in a numeric value"); };
}

// Accepts imaginary literals such as 0.5i or 1+2i.
cplx parse_number(const std::string& text) {
    static const std::regex imag(R"(([0-9.]+(?:[eE][-+]?[0-9]+)?)i\b)");
    return parse_scalar(std::regex_replace(text, imag, "$1*i"), no_symbols()).eval(Assignment{});
}

bool is_numeric_factor(const std::string& f) {
    if (f.empty()) return false;
    if (f == "i") return true;
    try {
        parse_number(f);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// Value of a coefficient, continued through removable singularities by Richardson extrapolation
// along a fixed direction in the real symbols.
cplx eval_continuous(const ScalarExpr& e, const Assignment& a, const FilterSpec* f, int& limits) {
    try {
        return e.eval(a, f);
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::Division) throw;
    }
    ++limits;
    std::vector<SymId> syms;
    double scale = 0;
    for (SymId s : e.free_symbols())
        if (s != sym_t() && s != sym_tau() && symbol_info(s).real) {
            syms.push_back(s);
            scale = std::max(scale, std::abs(a.get(s)));
        }
    if (syms.empty() || scale == 0) fail(ErrorKind::Division, "coefficient " + e.str() + " is singular at the given values");
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> dir(0.5, 1.5);
    std::vector<double> r(syms.size());
    for (auto& x : r) x = dir(rng);
    auto at = [&](double h) {
        Assignment b = a;
        for (std::size_t i = 0; i < syms.size(); ++i) b.set(syms[i], a.get(syms[i]) + h * r[i] * scale);
        return e.eval(b, f);
    };
    const double h = 1e-3;
    return (8.0 * at(h / 4) - 6.0 * at(h / 2) + at(h)) / 3.0;
}

std::vector<cplx> compile_poly(const ScalarExpr& e, const Assignment& a, const FilterSpec* f, int& limits) {
    if (!e.depends_on(sym_t())) return {eval_continuous(e, a, f, limits)};
    auto series = e.laurent(sym_t(), 64);
    if (series.empty()) return {0.0};
    if (series.begin()->first < 0) fail(ErrorKind::Validation, "coefficient " + e.str() + " is not polynomial in t");
    std::vector<cplx> poly(series.rbegin()->first + 1, 0.0);
    for (const auto& [k, c] : series) poly[k] = eval_continuous(c, a, f, limits);
    return poly;
}

double row_sum_norm(const SparseMatrix& m) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) rows(it.row()) += std::abs(it.value());
    return m.rows() ? rows.maxCoeff() : 0.0;
}

SparseMatrix sparse_key(const ModeTable& mt, const OpKey& k) { return key_matrix(mt, k).sparseView(); }

}  // namespace

Observable parse_observable(const std::string& label, const std::string& text, const ModeTablePtr& modes) {
    Observable obs{label, OperatorSum::identity(modes, ScalarExpr())};
    std::string s = trim(text);
    if (s.empty()) fail(ErrorKind::Parse, "observable '" + label + "' is empty");
    std::vector<std::pair<int, std::string>> terms;
    int sign = 1;
    std::string cur;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        bool exponent = i > 0 && (s[i - 1] == 'e' || s[i - 1] == 'E') && i > 1 && std::isdigit(static_cast<unsigned char>(s[i - 2]));
        if (depth == 0 && (c == '+' || c == '-') && !exponent && !trim(cur).empty()) {
            terms.push_back({sign, trim(cur)});
            cur.clear();
            sign = c == '-' ? -1 : 1;
        } else if (depth == 0 && (c == '+' || c == '-') && trim(cur).empty()) {
            sign *= c == '-' ? -1 : 1;
        } else {
            cur += c;
        }
    }
    if (trim(cur).empty()) fail(ErrorKind::Parse, "observable '" + label + "': dangling sign");
    terms.push_back({sign, trim(cur)});
    for (const auto& [sg, term] : terms) {
        ScalarExpr w(static_cast<long>(sg));
        std::vector<std::string> factors;
        std::stringstream ss(term);
        std::string f;
        while (std::getline(ss, f, '*')) factors.push_back(trim(f));
        std::size_t k = 0;
        while (k < factors.size() && is_numeric_factor(factors[k])) w *= parse_scalar(factors[k++], no_symbols());
        std::string op;
        for (std::size_t j = k; j < factors.size(); ++j) op += (j > k ? "*" : "") + factors[j];
        OperatorSum part = op.empty() ? OperatorSum::identity(modes) : parse_operator(op, modes);
        obs.op = obs.op + part.scaled(w);
    }
    return obs;
}

DenseMatrix parse_initial_state(const std::string& text, const ModeTable& modes) {
    std::vector<std::string> factors;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth == 0 && (c == '*' || c == ',')) {
            factors.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    factors.push_back(trim(cur));
    const auto& ms = modes.modes();
    if (factors.size() != ms.size())
        fail(ErrorKind::Validation, "initial state '" + text + "': expected " + std::to_string(ms.size()) +
                                        " factors, one per mode, got " + std::to_string(factors.size()));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const std::string& f = factors[i];
        int d = ms[i].dim();
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
        std::string where = "initial state factor '" + f + "' for mode '" + ms[i].name + "'";
        auto arg = [&](const std::string& head) -> std::optional<std::string> {
            if (f.rfind(head + "(", 0) == 0 && f.back() == ')') return f.substr(head.size() + 1, f.size() - head.size() - 2);
            return std::nullopt;
        };
        if (f == "g" || f == "e") {
            if (ms[i].kind != ModeKind::TwoLevel) fail(ErrorKind::Validation, where + ": g/e apply to two-level modes");
            v(f == "g" ? 0 : 1) = 1;
        } else if (auto n = arg("fock")) {
            int k = -1;
            try {
                k = std::stoi(*n);
            } catch (...) {
            }
            if (k < 0 || k >= d) fail(ErrorKind::Validation, where + ": level out of range 0.." + std::to_string(d - 1));
            v(k) = 1;
        } else if (auto a = arg("coherent")) {
            if (ms[i].kind != ModeKind::Boson) fail(ErrorKind::Validation, where + ": coherent states need a bosonic mode");
            cplx alpha;
            try {
                alpha = parse_number(*a);
            } catch (const Error& e) {
                fail(ErrorKind::Validation, where + ": " + e.what());
            }
            cplx amp = std::exp(-std::norm(alpha) / 2);
            for (int k = 0; k < d; ++k) {
                v(k) = amp;
                amp *= alpha / std::sqrt(static_cast<double>(k + 1));
            }
            v.normalize();
        } else {
            fail(ErrorKind::Validation, where + ": expected fock(n), coherent(alpha), g or e");
        }
        Eigen::VectorXcd next(psi.size() * d);
        for (Eigen::Index p = 0; p < psi.size(); ++p) next.segment(p * d, d) = psi(p) * v;
        psi = next;
    }
    return psi * psi.adjoint();
}

SparseMatrix sparse_realization(const OperatorSum& op, const Assignment& assign) {
    return matrix_realization(op, assign).sparseView();
}

cplx expectation(const SparseMatrix& op, const DenseMatrix& rho) {
    cplx s = 0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op, k); it; ++it) s += it.value() * rho(it.col(), it.row());
    return s;
}

cplx Generator::coefficient(const std::vector<cplx>& poly, double omega, double t) {
    cplx p = 0;
    for (std::size_t k = poly.size(); k-- > 0;) p = p * t + poly[k];
    return p * std::exp(cplx(0, -omega * t));
}

Generator Generator::exact(const ModelSpec& m, const Assignment& assign) {
    Generator g;
    g.modes_ = m.modes;
    g.dim_ = m.modes->dimension();
    if (g.dim_ > dimension_cap())
        fail(ErrorKind::Resource, "Hilbert-space dimension " + std::to_string(g.dim_) + " exceeds the cap of " +
                                      std::to_string(dimension_cap()));
    for (const auto& t : m.terms) {
        cplx c = eval_continuous(t.coeff, assign, &m.filter, g.continuity_limits_);
        std::vector<cplx> poly{c};
        for (const auto& r : m.ramps)
            if (t.coeff.depends_on(r.symbol)) {
                double T = assign.get(r.duration).real();
                poly = r.profile == RampProfile::Up ? std::vector<cplx>{0.0, c / T} : std::vector<cplx>{c, -c / T};
            }
        g.ham_.push_back({poly, t.freq.eval(assign).real(), sparse_realization(t.op, assign)});
    }
    g.finalize();
    return g;
}

Generator Generator::tcg(const EffectiveModel& e, const Assignment& assign) {
    Generator g;
    g.modes_ = e.modes;
    g.dim_ = e.modes->dimension();
    if (g.dim_ > dimension_cap())
        fail(ErrorKind::Resource, "Hilbert-space dimension " + std::to_string(g.dim_) + " exceeds the cap of " +
                                      std::to_string(dimension_cap()));
    const ModeTable& mt = *e.modes;
    for (const auto& h : e.hamiltonian) {
        auto poly = compile_poly(h.coeff, assign, &e.filter, g.continuity_limits_);
        g.ham_.push_back({poly, h.freq.eval(assign).real(), sparse_realization(h.op, assign)});
    }
    for (const auto& d : e.dissipators) {
        auto poly = compile_poly(d.rate, assign, &e.filter, g.continuity_limits_);
        g.dis_.push_back({poly, d.freq.eval(assign).real(), sparse_key(mt, d.L), sparse_key(mt, d.J)});
    }
    g.finalize();
    return g;
}

void Generator::Combo::build(const std::vector<std::pair<const SparseMatrix*, int>>& members, long dim) {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (const auto& [m, k] : members)
        for (int c = 0; c < m->outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(*m, c); it; ++it) trip.emplace_back(it.row(), it.col(), 1.0);
    pattern = SparseMatrix(dim, dim);
    pattern.setFromTriplets(trip.begin(), trip.end());
    pattern.makeCompressed();
    const auto* outer = pattern.outerIndexPtr();
    const auto* inner = pattern.innerIndexPtr();
    coeff.clear();
    slots.clear();
    for (const auto& [m, k] : members) {
        coeff.push_back(k);
        auto& sl = slots.emplace_back();
        for (int c = 0; c < m->outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(*m, c); it; ++it) {
                auto pos = std::lower_bound(inner + outer[it.col()], inner + outer[it.col() + 1], it.row());
                sl.push_back({int(pos - inner), it.value()});
            }
    }
}

SparseMatrix Generator::Combo::eval(const std::vector<cplx>& c) const {
    SparseMatrix s = pattern;
    cplx* v = s.valuePtr();
    std::fill(v, v + s.nonZeros(), cplx(0));
    for (std::size_t m = 0; m < slots.size(); ++m) {
        cplx w = c[coeff[m]];
        for (const auto& [k, x] : slots[m]) v[k] += w * x;
    }
    return s;
}

void Generator::finalize() {
    std::vector<std::pair<const SparseMatrix*, int>> hm;
    for (std::size_t k = 0; k < ham_.size(); ++k) hm.push_back({&ham_[k].op, int(k)});
    h_sum_.build(hm, dim_);
    std::vector<SparseMatrix> jl, jlt, jt;
    jl.reserve(dis_.size());
    jlt.reserve(dis_.size());
    jt.reserve(dis_.size());
    for (const auto& d : dis_) {
        jl.push_back(d.J * d.L);
        jlt.push_back(jl.back().transpose());
        jt.push_back(d.J.transpose());
    }
    std::vector<std::pair<const SparseMatrix*, int>> km, ktm;
    for (std::size_t k = 0; k < dis_.size(); ++k) {
        km.push_back({&jl[k], int(k)});
        ktm.push_back({&jlt[k], int(k)});
    }
    k_sum_.build(km, dim_);
    kt_sum_.build(ktm, dim_);
    std::vector<std::vector<std::pair<const SparseMatrix*, int>>> members;
    groups_.clear();
    for (std::size_t k = 0; k < dis_.size(); ++k) {
        std::size_t g = 0;
        for (; g < groups_.size(); ++g)
            if (groups_[g].L.nonZeros() == dis_[k].L.nonZeros() && (groups_[g].L - dis_[k].L).norm() == 0) break;
        if (g == groups_.size()) {
            groups_.push_back({dis_[k].L, {}});
            members.emplace_back();
        }
        members[g].push_back({&jt[k], int(k)});
    }
    for (std::size_t g = 0; g < groups_.size(); ++g) groups_[g].Jt.build(members[g], dim_);
}

std::vector<cplx> Generator::dissipator_coefficients(double t) const {
    std::vector<cplx> c;
    c.reserve(dis_.size());
    for (const auto& d : dis_) c.push_back(coefficient(d.poly, d.omega, t));
    return c;
}

DenseMatrix Generator::hamiltonian(double t) const {
    DenseMatrix H = DenseMatrix::Zero(dim_, dim_);
    for (const auto& h : ham_) H += coefficient(h.poly, h.omega, t) * DenseMatrix(h.op);
    return H;
}

DenseMatrix Generator::dissipator(double t, const DenseMatrix& rho) const {
    auto c = dissipator_coefficients(t);
    DenseMatrix Lr(dim_, dim_), X(dim_, dim_);
    // X * S computed as (S^T X^T)^T to keep sparse operands on the left
    X.noalias() = kt_sum_.eval(c) * rho.transpose();
    DenseMatrix out = -0.5 * X.transpose();
    X.noalias() = k_sum_.eval(c) * rho;
    out -= 0.5 * X;
    for (const auto& g : groups_) {
        Lr.noalias() = g.L * rho;
        X.noalias() = g.Jt.eval(c) * Lr.transpose();
        out += X.transpose();
    }
    return out;
}

DenseMatrix Generator::rhs(double t, const DenseMatrix& rho) const {
    std::vector<cplx> c;
    c.reserve(ham_.size());
    for (const auto& h : ham_) c.push_back(coefficient(h.poly, h.omega, t));
    DenseMatrix A(dim_, dim_);
    A.noalias() = h_sum_.eval(c) * rho;
    // rho H = (H rho)^dagger for Hermitian H and rho
    DenseMatrix out = cplx(0, -1) * (A - A.adjoint());
    if (!dis_.empty()) out += dissipator(t, rho);
    return out;
}

double Generator::max_frequency() const {
    double w = 0;
    for (const auto& h : ham_) w = std::max(w, std::abs(h.omega));
    for (const auto& d : dis_) w = std::max(w, std::abs(d.omega));
    return w;
}

double Generator::fastest_rate() const {
    std::vector<std::pair<double, double>> scale;  // (weight, |omega|)
    double total = 0;
    for (const auto& h : ham_) {
        double mag = 0;
        for (const auto& c : h.poly) mag += std::abs(c);
        double w = mag * row_sum_norm(h.op);
        scale.push_back({w, std::abs(h.omega)});
        total += w;
    }
    for (const auto& d : dis_) {
        double mag = 0;
        for (const auto& c : d.poly) mag += std::abs(c);
        double w = mag * row_sum_norm(d.L) * row_sum_norm(d.J);
        scale.push_back({w, std::abs(d.omega)});
        total += w;
    }
    double omega = 0, norm = 0;
    for (const auto& [w, o] : scale)
        if (w >= 1e-6 * total) {
            omega = std::max(omega, o);
            norm += w;
        }
    return omega + norm;
}

double step_rule(const Generator& g) {
    double r = g.fastest_rate();
    if (r <= 0) return 0;
    return 2 * M_PI / (40 * r);
}

Trajectory integrate(const Generator& g, const DenseMatrix& rho0, const IntegrateOptions& opts) {
    if (rho0.rows() != g.dimension() || rho0.cols() != g.dimension())
        fail(ErrorKind::Shape, "initial state dimension " + std::to_string(rho0.rows()) + " does not match " +
                                   std::to_string(g.dimension()));
    if (!(opts.t1 > opts.t0)) fail(ErrorKind::Validation, "integration window must satisfy t1 > t0");
    double dt = opts.dt > 0 ? opts.dt : step_rule(g);
    if (!(dt > 0)) dt = (opts.t1 - opts.t0) / 100;
    long n = static_cast<long>(std::ceil((opts.t1 - opts.t0) / dt - 1e-9));
    n = std::max(1L, n);
    dt = (opts.t1 - opts.t0) / n;

    Trajectory tr;
    std::vector<SparseMatrix> obs;
    for (const auto& o : opts.observables) {
        obs.push_back(sparse_realization(o.op, Assignment{}));
        if (obs.back().rows() != g.dimension()) fail(ErrorKind::Shape, "observable '" + o.label + "' has the wrong dimension");
        tr.labels.push_back(o.label);
    }
    tr.series.resize(obs.size());

    // Indices of the top level of each bosonic mode.
    std::vector<std::pair<std::string, std::vector<long>>> top;
    {
        const auto& ms = g.modes().modes();
        long stride = g.dimension();
        for (const auto& m : ms) {
            stride /= m.dim();
            if (m.kind != ModeKind::Boson) continue;
            std::vector<long> idx;
            for (long i = 0; i < g.dimension(); ++i)
                if ((i / stride) % m.dim() == m.dim() - 1) idx.push_back(i);
            top.push_back({m.name, idx});
        }
    }

    nlohmann::json warnings = nlohmann::json::array();
    auto guard = [&](const std::string& msg) {
        if (opts.policy == GuardPolicy::Abort) fail(ErrorKind::Numeric, msg);
        if (warnings.size() < 20) warnings.push_back(msg);
    };
    cplx trace0 = rho0.trace();
    auto num = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", x);
        return std::string(buf);
    };
    auto record = [&](long step, double t, const DenseMatrix& rho) {
        tr.times.push_back(t);
        for (std::size_t k = 0; k < obs.size(); ++k) tr.series[k].push_back(expectation(obs[k], rho));
        if (opts.store_every > 0 && step % opts.store_every == 0) {
            tr.state_times.push_back(t);
            tr.states.push_back(rho);
        }
        if (std::abs(rho.trace() - trace0) > opts.trace_tolerance)
            guard("trace drift " + num(std::abs(rho.trace() - trace0)) + " at t=" + num(t));
        if (step % 16 == 0 || step == n)
            for (const auto& [name, idx] : top) {
                double p = 0;
                for (long i : idx) p += rho(i, i).real();
                if (p > opts.top_level_guard)
                    guard("top-level population " + num(p) + " of mode '" + name + "' at t=" + num(t));
            }
    };

    DenseMatrix rho = rho0;
    record(0, opts.t0, rho);
    for (long s = 1; s <= n; ++s) {
        double t = opts.t0 + (s - 1) * dt;
        DenseMatrix k1 = g.rhs(t, rho);
        DenseMatrix k2 = g.rhs(t + dt / 2, rho + (dt / 2) * k1);
        DenseMatrix k3 = g.rhs(t + dt / 2, rho + (dt / 2) * k2);
        DenseMatrix k4 = g.rhs(t + dt, rho + dt * k3);
        rho += (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        record(s, opts.t0 + s * dt, rho);
    }
    tr.final_state = rho;
    tr.meta = {{"t0", opts.t0},
               {"t1", opts.t1},
               {"dt", dt},
               {"steps", n},
               {"dimension", g.dimension()},
               {"continuity_limits", g.continuity_limits()},
               {"warnings", warnings}};
    return tr;
}

DenseMatrix filtered_state(const Generator& exact, const DenseMatrix& rho_start, double t_center, double tau, double dt) {
    if (!(tau > 0)) return rho_start;
    IntegrateOptions o;
    o.t0 = t_center - 5 * tau;
    o.t1 = t_center + 5 * tau;
    o.dt = dt > 0 ? dt : step_rule(exact);
    if (!(o.dt > 0)) o.dt = tau / 20;
    long n = static_cast<long>(std::ceil((o.t1 - o.t0) / o.dt));
    n += n % 2;
    o.dt = (o.t1 - o.t0) / n;
    o.store_every = 1;
    Trajectory tr = integrate(exact, rho_start, o);
    FilterSpec f;
    f.kind = FilterKind::Gaussian;
    f.tau = tau;
    Trajectory cg = coarse_grain_trajectory(tr, f, t_center, t_center);
    if (cg.states.empty()) fail(ErrorKind::Margin, "filtered state: no grid point at the requested center");
    return cg.states.front();
}

namespace {

struct Kernel {
    std::vector<double> w;
    long half = 0;
};

Kernel gaussian_kernel(double tau, double dt) {
    Kernel k;
    if (tau <= 0) {
        k.w = {1.0};
        return k;
    }
    k.half = static_cast<long>(std::floor(5 * tau / dt + 1e-9));
    double sum = 0;
    for (long j = -k.half; j <= k.half; ++j) {
        double x = j * dt / tau;
        k.w.push_back(std::exp(-x * x / 2));
        sum += k.w.back();
    }
    for (auto& x : k.w) x /= sum;
    return k;
}

double uniform_step(const std::vector<double>& t) {
    if (t.size() < 2) fail(ErrorKind::Shape, "series needs at least two samples");
    double dt = (t.back() - t.front()) / (t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) fail(ErrorKind::Shape, "series grid is not uniform");
    return dt;
}

// Indices of output samples in [out_t0, out_t1] with full kernel support.
std::pair<long, long> interior(const std::vector<double>& t, double dt, long half, double out_t0, double out_t1,
                               double tau) {
    long n = static_cast<long>(t.size());
    double eps = 1e-6 * dt;
    long lo = static_cast<long>(std::ceil((out_t0 - t.front()) / dt - 1e-6));
    long hi = static_cast<long>(std::floor((out_t1 - t.front()) / dt + 1e-6));
    if (lo - half < 0 || hi + half > n - 1 || out_t0 < t.front() - eps || out_t1 > t.back() + eps) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "coarse-graining needs samples from %.6g to %.6g (padding 5*tau = %.6g beyond the output window "
                      "[%.6g, %.6g]); the grid covers [%.6g, %.6g]",
                      out_t0 - 5 * tau, out_t1 + 5 * tau, 5 * tau, out_t0, out_t1, t.front(), t.back());
        fail(ErrorKind::Margin, buf);
    }
    return {lo, hi};
}

}  // namespace

Series coarse_grain_series(const Series& s, double tau, double out_t0, double out_t1) {
    if (s.t.size() != s.v.size()) fail(ErrorKind::Shape, "series time and value lengths differ");
    double dt = uniform_step(s.t);
    Kernel k = gaussian_kernel(tau, dt);
    auto [lo, hi] = interior(s.t, dt, k.half, out_t0, out_t1, tau);
    Series out;
    for (long i = lo; i <= hi; ++i) {
        cplx acc = 0;
        for (long j = -k.half; j <= k.half; ++j) acc += k.w[j + k.half] * s.v[i + j];
        out.t.push_back(s.t[i]);
        out.v.push_back(acc);
    }
    return out;
}

Trajectory coarse_grain_trajectory(const Trajectory& traj, const FilterSpec& filter, double out_t0, double out_t1) {
    if (filter.kind != FilterKind::Gaussian) fail(ErrorKind::UnsupportedFilter, "coarse-graining supports the gaussian filter");
    if (!filter.tau) fail(ErrorKind::Validation, "coarse-graining needs a numeric tau");
    double tau = *filter.tau;
    if (traj.times.size() >= 2) {
        double dt = uniform_step(traj.times);
        interior(traj.times, dt, gaussian_kernel(tau, dt).half, out_t0, out_t1, tau);
    }
    Trajectory out;
    out.labels = traj.labels;
    out.meta = traj.meta;
    out.meta["coarse_grained"] = {{"tau", tau}, {"t0", out_t0}, {"t1", out_t1}};
    out.series.resize(traj.series.size());
    for (std::size_t k = 0; k < traj.series.size(); ++k) {
        Series cg = coarse_grain_series({traj.times, traj.series[k]}, tau, out_t0, out_t1);
        out.times = cg.t;
        out.series[k] = cg.v;
    }
    if (!traj.states.empty()) {
        double dt = uniform_step(traj.state_times);
        Kernel k = gaussian_kernel(tau, dt);
        auto [lo, hi] = interior(traj.state_times, dt, k.half, out_t0, out_t1, tau);
        for (long i = lo; i <= hi; ++i) {
            DenseMatrix acc = DenseMatrix::Zero(traj.states[0].rows(), traj.states[0].cols());
            for (long j = -k.half; j <= k.half; ++j) acc += k.w[j + k.half] * traj.states[i + j];
            out.state_times.push_back(traj.state_times[i]);
            out.states.push_back(acc);
        }
        out.final_state = out.states.back();
    }
    return out;
}

Metrics compare_series(const Series& ref, const Series& test) {
    if (ref.t.size() != test.t.size()) fail(ErrorKind::Shape, "series grids differ in length");
    if (ref.t.empty()) fail(ErrorKind::Shape, "series are empty");
    double span = std::max(1e-300, std::abs(ref.t.back() - ref.t.front()));
    for (std::size_t i = 0; i < ref.t.size(); ++i)
        if (std::abs(ref.t[i] - test.t[i]) > 1e-9 * span) fail(ErrorKind::Shape, "series grids differ at sample " + std::to_string(i));
    Metrics m;
    double lo = ref.v[0].real(), hi = lo, sq = 0;
    for (std::size_t i = 0; i < ref.v.size(); ++i) {
        double d = std::abs(ref.v[i] - test.v[i]);
        sq += d * d;
        m.max_abs = std::max(m.max_abs, d);
        lo = std::min(lo, ref.v[i].real());
        hi = std::max(hi, ref.v[i].real());
    }
    m.rms = std::sqrt(sq / ref.v.size());
    m.normalized_rms = hi > lo ? m.rms / (hi - lo) : m.rms;
    return m;
}

std::vector<RateSample> rate_decomposition(const Generator& tcg, const Trajectory& traj, double gap_tolerance) {
    if (traj.states.empty()) fail(ErrorKind::Validation, "rate decomposition needs stored states");
    std::vector<RateSample> out;
    double rate = std::max(tcg.fastest_rate(), 1e-300);
    double h = 1e-4 * 2 * M_PI / rate;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        double t = traj.state_times[s];
        const DenseMatrix& rho = traj.states[s];
        DenseMatrix H = tcg.hamiltonian(t);
        H = (H + H.adjoint()).eval() / 2.0;
        Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(H);
        const auto& E = eig.eigenvalues();
        const auto& V = eig.eigenvectors();
        double scale = std::max(1.0, E.cwiseAbs().maxCoeff());
        RateSample r{t, 0, 0, false};
        if (E.size() > 1 && E(1) - E(0) <= gap_tolerance * scale) {
            r.degenerate = true;
            r.inert = r.dynam = std::nan("");
            out.push_back(r);
            continue;
        }
        DenseMatrix Hdot = (tcg.hamiltonian(t + h) - tcg.hamiltonian(t - h)) / (2 * h);
        Eigen::VectorXcd v0 = V.col(0);
        Eigen::VectorXcd Hv0 = Hdot * v0;
        Eigen::VectorXcd rv = rho.adjoint() * v0;  // components <0|rho|n> = conj(<n|rho^dagger|0>)
        double inert = 0;
        for (Eigen::Index n = 1; n < E.size(); ++n) {
            cplx num = V.col(n).dot(Hv0);
            cplx r0n = std::conj(V.col(n).dot(rv));
            inert += 2 * (num / (E(0) - E(n)) * r0n).real();
        }
        r.inert = inert;
        r.dynam = tcg.has_dissipators() ? v0.dot(tcg.dissipator(t, rho) * v0).real() : 0.0;
        out.push_back(r);
    }
    return out;
}

std::string series_csv(const Trajectory& traj) {
    std::vector<bool> complex(traj.series.size(), false);
    for (std::size_t k = 0; k < traj.series.size(); ++k) {
        double mag = 0, im = 0;
        for (const auto& v : traj.series[k]) {
            mag = std::max(mag, std::abs(v));
            im = std::max(im, std::abs(v.imag()));
        }
        complex[k] = im > 1e-12 * std::max(1.0, mag);
    }
    std::string out = "t";
    for (std::size_t k = 0; k < traj.labels.size(); ++k)
        out += complex[k] ? "," + traj.labels[k] + "_re," + traj.labels[k] + "_im" : "," + traj.labels[k];
    out += "\n";
    char buf[64];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.15e", traj.times[i]);
        out += buf;
        for (std::size_t k = 0; k < traj.series.size(); ++k) {
            std::snprintf(buf, sizeof buf, ",%.15e", traj.series[k][i].real());
            out += buf;
            if (complex[k]) {
                std::snprintf(buf, sizeof buf, ",%.15e", traj.series[k][i].imag());
                out += buf;
            }
        }
        out += "\n";
    }
    return out;
}

Trajectory read_series_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Validation, "csv: missing header");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(trim(c));
    }
    if (cols.empty() || cols[0] != "t") fail(ErrorKind::Validation, "csv: first column must be 't'");
    Trajectory tr;
    // column -> (series index, imaginary part)
    std::vector<std::pair<int, bool>> map(cols.size(), {-1, false});
    for (std::size_t c = 1; c < cols.size(); ++c) {
        std::string name = cols[c];
        bool im = false;
        auto ends = [&](const std::string& suf) {
            return name.size() > suf.size() && name.compare(name.size() - suf.size(), suf.size(), suf) == 0;
        };
        if (ends("_im")) {
            im = true;
            name = name.substr(0, name.size() - 3);
        } else if (ends("_re") && c + 1 < cols.size() && cols[c + 1] == name.substr(0, name.size() - 3) + "_im") {
            name = name.substr(0, name.size() - 3);
        }
        auto it = std::find(tr.labels.begin(), tr.labels.end(), name);
        int idx;
        if (it == tr.labels.end()) {
            tr.labels.push_back(name);
            idx = static_cast<int>(tr.labels.size()) - 1;
        } else {
            idx = static_cast<int>(it - tr.labels.begin());
        }
        map[c] = {idx, im};
    }
    tr.series.resize(tr.labels.size());
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string c;
        std::vector<double> vals;
        while (std::getline(ss, c, ',')) {
            try {
                vals.push_back(std::stod(c));
            } catch (...) {
                fail(ErrorKind::Validation, "csv row " + std::to_string(row) + ": bad number '" + c + "'");
            }
        }
        if (vals.size() != cols.size()) fail(ErrorKind::Validation, "csv row " + std::to_string(row) + ": wrong column count");
        tr.times.push_back(vals[0]);
        for (auto& s : tr.series) s.push_back(0.0);
        for (std::size_t k = 1; k < cols.size(); ++k) {
            auto& slot = tr.series[map[k].first].back();
            slot += map[k].second ? cplx(0, vals[k]) : cplx(vals[k], 0);
        }
    }
    return tr;
}

}  // namespace stcg
