#include "stcg/stcg.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "effective.hpp"
#include "error.hpp"
#include "expr_parse.hpp"
#include "presets.hpp"
#include "simulator.hpp"

using namespace stcg;
using nlohmann::json;

struct stcg_model {
    ModelSpec spec;
};

struct stcg_effective {
    EffectiveModel eff;
};

struct stcg_trajectory {
    Trajectory traj;
};

namespace {

thread_local std::string last_error;

int status_of(ErrorKind k) { return static_cast<int>(k) + 1; }

template <class F>
int guarded(F&& fn) {
    try {
        fn();
        last_error.clear();
        return STCG_OK;
    } catch (const Error& e) {
        last_error = std::string(error_kind_name(e.kind())) + ": " + e.what();
        return status_of(e.kind());
    } catch (const json::exception& e) {
        last_error = std::string("validation: ") + e.what();
        return STCG_ERR_VALIDATION;
    } catch (const std::bad_alloc&) {
        last_error = "resource: out of memory";
        return STCG_ERR_RESOURCE;
    } catch (const std::exception& e) {
        last_error = std::string("internal: ") + e.what();
        return STCG_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorKind::Usage, std::string(what) + " must not be null");
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

json parse_json(const char* text, const char* what) {
    need(text, what);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Parse, std::string(what) + ": " + e.what());
    }
}

std::vector<Observable> observables(const ModeTablePtr& modes, const char* const* labels, const char* const* exprs,
                                    size_t n) {
    std::vector<Observable> out;
    if (n) {
        need(labels, "labels");
        need(exprs, "observables");
    }
    for (size_t i = 0; i < n; ++i) {
        need(labels[i], "observable label");
        need(exprs[i], "observable expression");
        out.push_back(parse_observable(labels[i], exprs[i], modes));
    }
    return out;
}

IntegrateOptions integrate_options(const stcg_simulate_options* o) {
    IntegrateOptions io;
    io.t0 = o->t0;
    io.t1 = o->t1;
    io.dt = o->dt;
    io.store_every = o->store_every;
    io.trace_tolerance = o->trace_tolerance;
    io.top_level_guard = o->top_level_guard;
    io.policy = o->warn_only ? GuardPolicy::Warn : GuardPolicy::Abort;
    return io;
}

}  // namespace

extern "C" {

const char* stcg_last_error(void) { return last_error.c_str(); }

const char* stcg_status_name(int status) {
    if (status == STCG_OK) return "ok";
    if (status == STCG_ERR_INTERNAL) return "internal";
    if (status >= 1 && status <= status_of(ErrorKind::Io)) return error_kind_name(static_cast<ErrorKind>(status - 1));
    return "unknown";
}

const char* stcg_version(void) { return "1.0.0"; }

void stcg_string_free(char* s) { std::free(s); }

int stcg_parse_quantity(const char* text, double* out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = parse_quantity(text);
    });
}

int stcg_model_from_json(const char* text, int autocomplete, stcg_model** out) {
    return guarded([&] {
        need(out, "out");
        json doc = parse_json(text, "model");
        *out = new stcg_model{load_model(doc, LoadOptions{autocomplete != 0})};
    });
}

int stcg_model_from_file(const char* path, int autocomplete, stcg_model** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new stcg_model{load_model_file(path, LoadOptions{autocomplete != 0})};
    });
}

int stcg_preset_json(const char* name, char** out) {
    return guarded([&] {
        need(name, "name");
        need(out, "out");
        const char* text = preset_text(name);
        if (!text) fail(ErrorKind::Usage, std::string("unknown preset '") + name + "' (rabi, parametron, duffing)");
        *out = dup(text);
    });
}

int stcg_model_set_params(stcg_model* m, const char* params_json) {
    return guarded([&] {
        need(m, "model");
        apply_params(m->spec, parse_json(params_json, "params"));
    });
}

int stcg_model_set_tau(stcg_model* m, double tau) {
    return guarded([&] {
        need(m, "model");
        if (!(tau >= 0)) fail(ErrorKind::Validation, "tau must be non-negative");
        m->spec.filter.tau = tau;
    });
}

int stcg_model_to_json(const stcg_model* m, char** out) {
    return guarded([&] {
        need(m, "model");
        need(out, "out");
        *out = dup(model_to_json(m->spec).dump(2) + "\n");
    });
}

void stcg_model_free(stcg_model* m) { delete m; }

void stcg_derive_options_init(stcg_derive_options* o) {
    if (!o) return;
    *o = stcg_derive_options{};
    o->order = 1;
    o->hamiltonian = 1;
    o->dissipators = 1;
}

int stcg_derive(const stcg_model* m, const stcg_derive_options* o, stcg_effective** out) {
    return guarded([&] {
        need(m, "model");
        need(o, "options");
        need(out, "out");
        if (o->order < 1) fail(ErrorKind::Usage, "order must be at least 1");
        if (o->threshold < 0) fail(ErrorKind::Usage, "threshold must be non-negative");
        DeriveOptions d;
        d.order = o->order;
        d.hamiltonian = o->hamiltonian != 0;
        d.dissipators = o->dissipators != 0;
        d.ir_limit = o->ir_limit != 0;
        d.convention = o->reversed_convention ? DissipatorConvention::Reversed : DissipatorConvention::Plain;
        d.workers = o->workers;
        EffectiveModel e = derive(m->spec, d);
        if (o->threshold > 0) e = prune_terms(e, o->threshold, e.values(), o->window_t0, o->window_t1);
        *out = new stcg_effective{std::move(e)};
    });
}

int stcg_effective_from_json(const char* text, stcg_effective** out) {
    return guarded([&] {
        need(out, "out");
        *out = new stcg_effective{import_json(parse_json(text, "effective model"))};
    });
}

int stcg_effective_to_json(const stcg_effective* e, char** out) {
    return guarded([&] {
        need(e, "effective model");
        need(out, "out");
        *out = dup(export_json(e->eff).dump(2) + "\n");
    });
}

int stcg_effective_to_text(const stcg_effective* e, char** out) {
    return guarded([&] {
        need(e, "effective model");
        need(out, "out");
        *out = dup(export_text(e->eff));
    });
}

int stcg_effective_counts(const stcg_effective* e, size_t* nh, size_t* nd) {
    return guarded([&] {
        need(e, "effective model");
        if (nh) *nh = e->eff.hamiltonian.size();
        if (nd) *nd = e->eff.dissipators.size();
    });
}

int stcg_effective_set_params(stcg_effective* e, const char* params_json) {
    return guarded([&] {
        need(e, "effective model");
        ModelSpec header;
        header.modes = e->eff.modes;
        header.symbols = e->eff.symbols;
        header.filter = e->eff.filter;
        apply_params(header, parse_json(params_json, "params"));
        e->eff.symbols = header.symbols;
        e->eff.filter = header.filter;
    });
}

void stcg_effective_free(stcg_effective* e) { delete e; }

void stcg_simulate_options_init(stcg_simulate_options* o) {
    if (!o) return;
    *o = stcg_simulate_options{};
    o->trace_tolerance = 1e-6;
    o->top_level_guard = 1e-2;
}

int stcg_simulate_model(const stcg_model* m, const char* initial, const char* const* labels,
                        const char* const* exprs, size_t n_obs, const stcg_simulate_options* o,
                        stcg_trajectory** out) {
    return guarded([&] {
        need(m, "model");
        need(initial, "initial");
        need(o, "options");
        need(out, "out");
        IntegrateOptions io = integrate_options(o);
        io.observables = observables(m->spec.modes, labels, exprs, n_obs);
        Generator g = Generator::exact(m->spec, m->spec.values());
        DenseMatrix rho = parse_initial_state(initial, *m->spec.modes);
        *out = new stcg_trajectory{integrate(g, rho, io)};
        (*out)->traj.meta["branch"] = "exact";
    });
}

int stcg_simulate_effective(const stcg_effective* e, const stcg_model* source, const char* initial,
                            const char* const* labels, const char* const* exprs, size_t n_obs,
                            const stcg_simulate_options* o, stcg_trajectory** out) {
    return guarded([&] {
        need(e, "effective model");
        need(initial, "initial");
        need(o, "options");
        need(out, "out");
        IntegrateOptions io = integrate_options(o);
        io.observables = observables(e->eff.modes, labels, exprs, n_obs);
        Generator g = Generator::tcg(e->eff, e->eff.values());
        DenseMatrix rho = parse_initial_state(initial, *e->eff.modes);
        if (o->prefilter_tau > 0) {
            need(source, "source model for the filtered initial state");
            if (source->spec.modes->dimension() != e->eff.modes->dimension())
                fail(ErrorKind::Shape, "source model and effective model have different dimensions");
            Generator exact = Generator::exact(source->spec, source->spec.values());
            rho = filtered_state(exact, rho, o->t0, o->prefilter_tau);
        }
        *out = new stcg_trajectory{integrate(g, rho, io)};
        (*out)->traj.meta["branch"] = "tcg";
        (*out)->traj.meta["order"] = e->eff.order;
        (*out)->traj.meta["initial_state"] = o->prefilter_tau > 0 ? "filtered" : "plain";
    });
}

int stcg_trajectory_coarse_grain(const stcg_trajectory* tr, double tau, double t0, double t1, stcg_trajectory** out) {
    return guarded([&] {
        need(tr, "trajectory");
        need(out, "out");
        FilterSpec f;
        f.kind = FilterKind::Gaussian;
        f.tau = tau;
        *out = new stcg_trajectory{coarse_grain_trajectory(tr->traj, f, t0, t1)};
    });
}

size_t stcg_trajectory_samples(const stcg_trajectory* tr) { return tr ? tr->traj.times.size() : 0; }

size_t stcg_trajectory_series_count(const stcg_trajectory* tr) { return tr ? tr->traj.series.size() : 0; }

const char* stcg_trajectory_label(const stcg_trajectory* tr, size_t k) {
    if (!tr || k >= tr->traj.labels.size()) return nullptr;
    return tr->traj.labels[k].c_str();
}

int stcg_trajectory_times(const stcg_trajectory* tr, double* t) {
    return guarded([&] {
        need(tr, "trajectory");
        need(t, "t");
        std::copy(tr->traj.times.begin(), tr->traj.times.end(), t);
    });
}

int stcg_trajectory_series(const stcg_trajectory* tr, size_t k, double* re, double* im) {
    return guarded([&] {
        need(tr, "trajectory");
        need(re, "re");
        if (k >= tr->traj.series.size()) fail(ErrorKind::Range, "series index out of range");
        const auto& s = tr->traj.series[k];
        for (size_t i = 0; i < s.size(); ++i) {
            re[i] = s[i].real();
            if (im) im[i] = s[i].imag();
        }
    });
}

int stcg_trajectory_csv(const stcg_trajectory* tr, char** out) {
    return guarded([&] {
        need(tr, "trajectory");
        need(out, "out");
        *out = dup(series_csv(tr->traj));
    });
}

int stcg_trajectory_meta_json(const stcg_trajectory* tr, char** out) {
    return guarded([&] {
        need(tr, "trajectory");
        need(out, "out");
        *out = dup(tr->traj.meta.dump(2) + "\n");
    });
}

void stcg_trajectory_free(stcg_trajectory* tr) { delete tr; }

int stcg_compare_csv(const char* reference_csv, const char* test_csv, char** out_json) {
    return guarded([&] {
        need(reference_csv, "reference");
        need(test_csv, "test");
        need(out_json, "out");
        Trajectory ref = read_series_csv(reference_csv), test = read_series_csv(test_csv);
        json report = json::object();
        int matched = 0;
        for (std::size_t k = 0; k < ref.labels.size(); ++k) {
            auto it = std::find(test.labels.begin(), test.labels.end(), ref.labels[k]);
            if (it == test.labels.end()) continue;
            Metrics mt = compare_series({ref.times, ref.series[k]}, {test.times, test.series[it - test.labels.begin()]});
            report[ref.labels[k]] = {{"rms", mt.rms}, {"max_abs", mt.max_abs}, {"normalized_rms", mt.normalized_rms}};
            ++matched;
        }
        if (!matched) fail(ErrorKind::Shape, "the two files share no series labels");
        *out_json = dup(report.dump(2) + "\n");
    });
}

}  // extern "C"
