#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "stcg/stcg.h"

namespace {

enum Exit { Ok = 0, Internal = 1, Usage = 2, Validation = 3, Numeric = 4 };

int exit_for(int status) {
    switch (status) {
    case STCG_OK:
        return Ok;
    case STCG_ERR_USAGE:
        return Usage;
    case STCG_ERR_PARSE:
    case STCG_ERR_VALIDATION:
    case STCG_ERR_REFERENCE:
    case STCG_ERR_HERMITICITY:
    case STCG_ERR_SHAPE:
    case STCG_ERR_INVALID_WEIGHT:
    case STCG_ERR_UNSUPPORTED_FILTER:
    case STCG_ERR_RANGE:
    case STCG_ERR_UNRESOLVED_SYMBOL:
    case STCG_ERR_IO:
        return Validation;
    case STCG_ERR_SINGULAR:
    case STCG_ERR_DIVERGENT:
    case STCG_ERR_DIVISION:
    case STCG_ERR_RESOURCE:
    case STCG_ERR_MARGIN:
    case STCG_ERR_NUMERIC:
    case STCG_ERR_ORACLE_MISMATCH:
        return Numeric;
    default:
        return Internal;
    }
}

struct Failure {
    int code;
    std::string message;
};

void check(int status) {
    if (status != STCG_OK) throw Failure{exit_for(status), stcg_last_error()};
}

struct StringOut {
    char* p = nullptr;
    ~StringOut() { stcg_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    ~Handle() { Free(p); }
};
using Model = Handle<stcg_model, stcg_model_free>;
using Effective = Handle<stcg_effective, stcg_effective_free>;
using Traj = Handle<stcg_trajectory, stcg_trajectory_free>;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{Validation, "cannot read '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes to a temporary file in the target directory and renames it into place.
void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Failure{Validation, "cannot write '" + path + "'"};
        out << content;
        out.flush();
        if (!out) throw Failure{Validation, "cannot write '" + path + "'"};
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Failure{Validation, "cannot write '" + path + "': " + ec.message()};
    }
}

double quantity(const std::string& text, const std::string& flag) {
    double v = 0;
    if (stcg_parse_quantity(text.c_str(), &v) != STCG_OK) throw Failure{Usage, flag + ": " + stcg_last_error()};
    return v;
}

std::string params_text(const std::string& arg) {
    auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && arg[first] == '{') return arg;
    return read_file(arg);
}

void load_model(Model& m, const std::string& path, const std::string& preset, bool autocomplete) {
    if (!preset.empty()) {
        StringOut doc;
        check(stcg_preset_json(preset.c_str(), &doc.p));
        check(stcg_model_from_json(doc.p, autocomplete, &m.p));
    } else {
        check(stcg_model_from_file(path.c_str(), autocomplete, &m.p));
    }
}

struct ObservableArgs {
    std::vector<std::string> labels, exprs;
    std::vector<const char*> label_ptrs, expr_ptrs;
};

ObservableArgs split_observables(const std::vector<std::string>& specs) {
    ObservableArgs o;
    for (const auto& s : specs) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw Failure{Usage, "--observable expects label=expression, got '" + s + "'"};
        o.labels.push_back(s.substr(0, eq));
        o.exprs.push_back(s.substr(eq + 1));
    }
    for (std::size_t i = 0; i < o.labels.size(); ++i) {
        o.label_ptrs.push_back(o.labels[i].c_str());
        o.expr_ptrs.push_back(o.exprs[i].c_str());
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-coarse-grained effective models: derive, simulate, compare"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(stcg_version()));

    struct {
        std::string model, preset, tau, params, format = "json", out, window;
        int order = 0, workers = 0;
        double threshold = 0;
        bool ir_limit = false, no_dissipators = false, no_hamiltonian = false, reversed = false, autocomplete = false;
    } d;
    auto* derive = app.add_subcommand("derive", "Derive an effective model");
    auto* d_src = derive->add_option_group("source");
    d_src->add_option("--model", d.model, "Model JSON file")->check(CLI::ExistingFile);
    d_src->add_option("--preset", d.preset, "Bundled model")->check(CLI::IsMember({"rabi", "parametron", "duffing"}));
    d_src->require_option(1);
    derive->add_option("--order", d.order, "Expansion order")->required()->check(CLI::PositiveNumber);
    derive->add_option("--tau", d.tau, "Filter width, e.g. 0.2ns");
    derive->add_option("--threshold", d.threshold, "Drop terms whose peak coefficient magnitude is below this (rad/s)")->check(CLI::NonNegativeNumber);
    derive->add_option("--window", d.window, "Pruning window t0,t1 for time-dependent coefficients");
    derive->add_option("--params", d.params, "Symbol values: JSON object or file");
    derive->add_option("--format", d.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    derive->add_flag("--ir-limit", d.ir_limit, "Drop exponentially suppressed filter terms");
    derive->add_flag("--no-dissipators", d.no_dissipators, "Hamiltonian only");
    derive->add_flag("--no-hamiltonian", d.no_hamiltonian, "Dissipators only");
    derive->add_flag("--reversed-convention", d.reversed, "Reversed-argument dissipator rates");
    derive->add_flag("--autocomplete", d.autocomplete, "Add missing Hermitian-conjugate terms");
    derive->add_option("--workers", d.workers, "Worker threads (default: STCG_WORKERS or hardware)")
        ->check(CLI::NonNegativeNumber);
    derive->add_option("-o,--output", d.out, "Output file (default stdout)");

    struct {
        std::string model, preset, effective, source, initial, t0 = "0", t1, dt, params, out, meta, cg_tau, cg_window,
            prefilter;
        std::vector<std::string> observables;
        double trace_tol = 1e-6, top_guard = 1e-2;
        bool warn_only = false, autocomplete = false;
    } s;
    auto* simulate = app.add_subcommand("simulate", "Integrate an exact or effective model");
    auto* s_src = simulate->add_option_group("source");
    s_src->add_option("--model", s.model, "Model JSON file (exact dynamics)")->check(CLI::ExistingFile);
    s_src->add_option("--preset", s.preset, "Bundled model (exact dynamics)")
        ->check(CLI::IsMember({"rabi", "parametron", "duffing"}));
    s_src->add_option("--effective", s.effective, "Effective model JSON file")->check(CLI::ExistingFile);
    s_src->require_option(1);
    simulate->add_option("--initial", s.initial, "Initial state, e.g. 'coherent(2)*e'")->required();
    simulate->add_option("--t0", s.t0, "Start time");
    simulate->add_option("--t1", s.t1, "End time")->required();
    simulate->add_option("--dt", s.dt, "Step (default: 40 steps per fastest period)");
    simulate->add_option("--observable", s.observables, "label=expression, repeatable");
    simulate->add_option("--params", s.params, "Symbol values: JSON object or file");
    simulate->add_option("--trace-tolerance", s.trace_tol, "Trace drift guard");
    simulate->add_option("--top-level-guard", s.top_guard, "Top Fock level population guard");
    simulate->add_flag("--warn-only", s.warn_only, "Guards warn instead of aborting");
    simulate->add_flag("--autocomplete", s.autocomplete, "Add missing Hermitian-conjugate terms");
    simulate->add_option("--prefilter", s.prefilter,
                         "Start an effective run from the exact state filtered with this width (needs --source)");
    simulate->add_option("--source", s.source, "Exact model for --prefilter")->check(CLI::ExistingFile);
    simulate->add_option("--coarse-grain", s.cg_tau, "Gaussian coarse-graining width applied to the output");
    simulate->add_option("--output-window", s.cg_window, "Output window t0,t1 (default with --coarse-grain: 5 widths inside the run)");
    simulate->add_option("--meta", s.meta, "Run summary JSON file");
    simulate->add_option("-o,--output", s.out, "CSV output (default stdout)");

    struct {
        std::string ref, test, out;
    } c;
    auto* compare = app.add_subcommand("compare", "Compare two series CSV files");
    compare->add_option("--ref", c.ref, "Reference CSV")->required()->check(CLI::ExistingFile);
    compare->add_option("--test", c.test, "Test CSV")->required()->check(CLI::ExistingFile);
    compare->add_option("-o,--output", c.out, "Metrics JSON (default stdout)");

    struct {
        std::string name, out;
    } p;
    auto* preset = app.add_subcommand("preset", "Write a bundled model file");
    preset->add_option("name", p.name, "rabi, parametron or duffing")
        ->required()
        ->check(CLI::IsMember({"rabi", "parametron", "duffing"}));
    preset->add_option("-o,--output", p.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? Ok : Usage;
    }

    auto window = [](const std::string& text, const std::string& flag) {
        auto comma = text.find(',');
        if (comma == std::string::npos) throw Failure{Usage, flag + " expects t0,t1"};
        return std::pair{quantity(text.substr(0, comma), flag), quantity(text.substr(comma + 1), flag)};
    };

    try {
        if (*derive) {
            Model m;
            load_model(m, d.model, d.preset, d.autocomplete);
            if (!d.params.empty()) check(stcg_model_set_params(m.p, params_text(d.params).c_str()));
            if (!d.tau.empty()) {
                double tau = quantity(d.tau, "--tau");
                if (tau < 0) throw Failure{Usage, "--tau must be non-negative"};
                check(stcg_model_set_tau(m.p, tau));
            }
            stcg_derive_options o;
            stcg_derive_options_init(&o);
            o.order = d.order;
            o.ir_limit = d.ir_limit;
            o.dissipators = !d.no_dissipators;
            o.hamiltonian = !d.no_hamiltonian;
            o.reversed_convention = d.reversed;
            o.workers = d.workers;
            o.threshold = d.threshold;
            if (!d.window.empty()) std::tie(o.window_t0, o.window_t1) = window(d.window, "--window");
            Effective e;
            check(stcg_derive(m.p, &o, &e.p));
            StringOut text;
            check(d.format == "text" ? stcg_effective_to_text(e.p, &text.p) : stcg_effective_to_json(e.p, &text.p));
            write_output(d.out, text.str());
        } else if (*simulate) {
            stcg_simulate_options o;
            stcg_simulate_options_init(&o);
            o.t0 = quantity(s.t0, "--t0");
            o.t1 = quantity(s.t1, "--t1");
            if (!s.dt.empty()) o.dt = quantity(s.dt, "--dt");
            o.trace_tolerance = s.trace_tol;
            o.top_level_guard = s.top_guard;
            o.warn_only = s.warn_only;
            ObservableArgs obs = split_observables(s.observables);
            std::string params = s.params.empty() ? "" : params_text(s.params);
            Traj tr;
            if (!s.effective.empty()) {
                Effective e;
                check(stcg_effective_from_json(read_file(s.effective).c_str(), &e.p));
                if (!params.empty()) check(stcg_effective_set_params(e.p, params.c_str()));
                Model src;
                if (!s.prefilter.empty()) {
                    if (s.source.empty()) throw Failure{Usage, "--prefilter needs --source"};
                    o.prefilter_tau = quantity(s.prefilter, "--prefilter");
                    check(stcg_model_from_file(s.source.c_str(), s.autocomplete, &src.p));
                    if (!params.empty()) check(stcg_model_set_params(src.p, params.c_str()));
                }
                check(stcg_simulate_effective(e.p, src.p, s.initial.c_str(), obs.label_ptrs.data(), obs.expr_ptrs.data(),
                                              obs.labels.size(), &o, &tr.p));
            } else {
                if (!s.prefilter.empty()) throw Failure{Usage, "--prefilter applies to --effective runs"};
                Model m;
                load_model(m, s.model, s.preset, s.autocomplete);
                if (!params.empty()) check(stcg_model_set_params(m.p, params.c_str()));
                check(stcg_simulate_model(m.p, s.initial.c_str(), obs.label_ptrs.data(), obs.expr_ptrs.data(),
                                          obs.labels.size(), &o, &tr.p));
            }
            if (!s.cg_tau.empty() || !s.cg_window.empty()) {
                double tau = s.cg_tau.empty() ? 0.0 : quantity(s.cg_tau, "--coarse-grain");
                auto [w0, w1] = s.cg_window.empty() ? std::pair{o.t0 + 5 * tau, o.t1 - 5 * tau}
                                                    : window(s.cg_window, "--output-window");
                Traj cg;
                check(stcg_trajectory_coarse_grain(tr.p, tau, w0, w1, &cg.p));
                std::swap(tr.p, cg.p);
            }
            StringOut csv;
            check(stcg_trajectory_csv(tr.p, &csv.p));
            write_output(s.out, csv.str());
            if (!s.meta.empty()) {
                StringOut meta;
                check(stcg_trajectory_meta_json(tr.p, &meta.p));
                write_output(s.meta, meta.str());
            }
        } else if (*compare) {
            StringOut report;
            check(stcg_compare_csv(read_file(c.ref).c_str(), read_file(c.test).c_str(), &report.p));
            write_output(c.out, report.str());
        } else if (*preset) {
            StringOut doc;
            check(stcg_preset_json(p.name.c_str(), &doc.p));
            write_output(p.out, doc.str());
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    }
    return Ok;
}
