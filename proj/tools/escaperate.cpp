// Command-line harness: reads a JSON experiment description, runs one of the
// pipeline stages, and writes deterministic CSV/JSON artifacts plus a run
// manifest into the output directory.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "escape/config.hpp"
#include "escape/escape_flow.hpp"

namespace {

constexpr const char* kToolName = "escaperate";
constexpr const char* kToolVersion = "1.0.0";

using namespace escape;

struct RunContext {
    ExperimentConfig cfg;
    std::string config_bytes;
    std::filesystem::path out;
    int jobs = 0;
    bool verbose = false;
    std::vector<std::string> artifacts;

    void note(const std::string& msg) const {
        if (verbose) std::cerr << "[" << kToolName << "] " << msg << "\n";
    }

    void write_artifact(const std::string& name, const std::string& content) {
        std::filesystem::create_directories(out);
        const std::filesystem::path path = out / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw ValidationError("cannot write artifact: " + path.string());
        f << content;
        if (!f.good()) throw ValidationError("short write on artifact: " + path.string());
        artifacts.push_back(name);
        note("wrote " + path.string());
    }
};

std::string json_word(const Word& w) { return "\"" + word_to_string(w) + "\""; }

// one row of the pinned result columns; empty strings leave a field blank
std::string csv_row(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ",";
        row += fields[i];
    }
    row += "\n";
    return row;
}

const char* kResultHeader =
    "n,delta,m,R_lower,R_upper,hole_measure,nu_slab_measure,ratio_lo,ratio_hi,gamma,"
    "mc_estimate,mc_stderr";

MarkovGibbsMeasure build_measure(const RunContext& ctx) {
    return equilibrium_state(ctx.cfg.matrix, ctx.cfg.potential());
}

RoofFunction build_roof(const RunContext& ctx) { return RoofFunction::from(ctx.cfg.roof()); }

DiscretizationParams resolve_discretization(const RunContext& ctx, const RoofFunction& f,
                                            const MarkovGibbsMeasure& mu) {
    const ExperimentConfig& cfg = ctx.cfg;
    if (!cfg.has_discretization) throw ConfigError("config field \"discretization\" is missing");
    if (cfg.delta_auto) {
        DiscretizationParams p = choose_discretization(f, mu, 0.1);
        ctx.note("auto discretization: delta " + format_real(p.delta) + ", m " +
                 std::to_string(p.m));
        return p;
    }
    DiscretizationParams p;
    p.delta = cfg.delta_request;
    p.m = *cfg.m;
    p.eta_m = eta(f.f, p.m);
    p.integral_f = mu.integral(f.f);
    if (!(p.delta < f.epsilon() / 3.0))
        throw InfeasibleError("delta " + format_real(p.delta) +
                              " is not below a third of the roof minimum");
    if (!(2.0 * p.delta + p.eta_m < 0.5 * p.integral_f))
        throw InfeasibleError("discretization too coarse: 2*delta + eta(m) = " +
                              format_real(2.0 * p.delta + p.eta_m) + " >= " +
                              format_real(0.5 * p.integral_f));
    return p;
}

Hole require_hole(const RunContext& ctx) {
    if (!ctx.cfg.hole) throw ConfigError("config field \"hole\" is missing");
    return *ctx.cfg.hole;
}

ShiftPoint require_target(const RunContext& ctx) {
    if (!ctx.cfg.target) throw ConfigError("config field \"target\" is missing");
    return *ctx.cfg.target;
}

NestedHoleSequence build_family(const RunContext& ctx, const MarkovGibbsMeasure& mu) {
    const ExperimentConfig& cfg = ctx.cfg;
    if (!cfg.n_min) throw ConfigError("config field \"holes\" is missing");
    NestedHoleSequence seq = make_nested_cylinders(mu, require_target(ctx), *cfg.n_min, *cfg.n_max);
    if (cfg.overrides.c) seq.c = *cfg.overrides.c;
    if (cfg.overrides.rho) seq.rho = *cfg.overrides.rho;
    if (cfg.overrides.kappa) seq.kappa = *cfg.overrides.kappa;
    if (!cfg.overrides.l.empty()) {
        if (cfg.overrides.l.size() != seq.holes.size())
            throw ConfigError("config field \"holes.l\" must list one depth per hole");
        seq.l = cfg.overrides.l;
    }
    return seq;
}

// ------------------------------------------------------------- subcommands

int run_pressure(RunContext& ctx) {
    const TransferOperator op = build_transfer(ctx.cfg.matrix, ctx.cfg.potential());
    std::ostringstream j;
    j << "{\n"
      << "  \"pressure\": " << format_real(op.pressure) << ",\n"
      << "  \"lambda\": " << format_real(op.lambda) << ",\n"
      << "  \"block_depth\": " << op.recode.m << ",\n"
      << "  \"iterations\": " << op.iterations << "\n}\n";
    ctx.write_artifact("pressure.json", j.str());
    return 0;
}

int run_gibbs_certify(RunContext& ctx) {
    const MarkovGibbsMeasure mu = build_measure(ctx);
    const GibbsCertificate cert = certify_gibbs(mu, ctx.cfg.n_scan);
    std::ostringstream j;
    j << "{\n"
      << "  \"n_max\": " << cert.n_max << ",\n"
      << "  \"c1\": " << format_real(cert.c1) << ",\n"
      << "  \"c2\": " << format_real(cert.c2) << ",\n"
      << "  \"arg_min\": " << json_word(cert.arg_min) << ",\n"
      << "  \"arg_max\": " << json_word(cert.arg_max) << ",\n"
      << "  \"two_sided\": " << (cert.two_sided() ? "true" : "false") << "\n}\n";
    ctx.write_artifact("gibbs_certify.json", j.str());
    return 0;
}

int run_escape_discrete(RunContext& ctx) {
    const MarkovGibbsMeasure mu = build_measure(ctx);
    const Hole H = require_hole(ctx);
    const EscapeResult r = escape_rate_discrete(mu, H, ctx.cfg.k_max);
    std::ostringstream j;
    j << "{\n"
      << "  \"rate\": " << format_real(r.rate) << ",\n"
      << "  \"rate_chain\": " << format_real(r.rate_chain) << ",\n"
      << "  \"open_eigenvalue\": " << format_real(r.open_eigenvalue) << ",\n"
      << "  \"full_escape\": " << (r.full_escape ? "true" : "false") << ",\n"
      << "  \"survivor_log_measures\": [";
    for (std::size_t k = 0; k < r.survivor_log_measures.size(); ++k)
        j << (k ? ", " : "") << format_real(r.survivor_log_measures[k]);
    j << "]\n}\n";
    ctx.write_artifact("escape_discrete.json", j.str());
    return 0;
}

int run_validate_nested(RunContext& ctx) {
    const MarkovGibbsMeasure mu = build_measure(ctx);
    const NestedHoleSequence seq = build_family(ctx, mu);
    const NestedReport rep = validate_nested(seq, mu);
    std::ostringstream j;
    j << "{\n  \"all_pass\": " << (rep.all_pass() ? "true" : "false") << ",\n  \"items\": [\n";
    for (std::size_t i = 0; i < rep.items.size(); ++i) {
        const NestedCheck& c = rep.items[i];
        j << "    {\"item\": " << c.item << ", \"applicable\": "
          << (c.applicable ? "true" : "false") << ", \"pass\": " << (c.pass ? "true" : "false")
          << ", \"witness_n\": " << c.witness_n << ", \"note\": \"" << c.note << "\"}"
          << (i + 1 < rep.items.size() ? "," : "") << "\n";
    }
    j << "  ]\n}\n";
    ctx.write_artifact("validate_nested.json", j.str());
    if (!rep.all_pass()) {
        std::cerr << "nested-condition validation failed\n";
        return 2;
    }
    return 0;
}

int run_build_suspension(RunContext& ctx) {
    const MarkovGibbsMeasure mu = build_measure(ctx);
    const RoofFunction f = build_roof(ctx);
    const DiscretizationParams params = resolve_discretization(ctx, f, mu);
    const DiscretizedRoof roof = roof_upper(f, params.m, params.delta);
    const SuspensionSFT S =
        build_suspension_sft(ctx.cfg.matrix, roof, std::max(params.m, mu.block_depth()));
    const SuspensionMeasure nu(mu, roof, S);
    ctx.note("tower states: " + std::to_string(S.state_count()));

    std::ostringstream j;
    j << "{\n  \"states\": [";
    for (int s = 0; s < S.state_count(); ++s) {
        const auto [wi, k] = S.unpack(s);
        j << (s ? ", " : "") << "[" << json_word(S.base_words[wi]) << ", " << k << "]";
    }
    j << "],\n  \"edges\": [";
    bool first = true;
    for (int s = 0; s < S.state_count(); ++s)
        for (int e = S.adjacency.ptr[s]; e < S.adjacency.ptr[s + 1]; ++e) {
            j << (first ? "" : ", ") << "[" << s << ", " << S.adjacency.col[e] << "]";
            first = false;
        }
    j << "],\n  \"state_measure\": [";
    const std::vector<double> masses = nu.state_measures();
    for (std::size_t s = 0; s < masses.size(); ++s)
        j << (s ? ", " : "") << format_real(masses[s]);
    j << "]\n}\n";
    ctx.write_artifact("suspension.json", j.str());
    return 0;
}

int run_verify_invariance(RunContext& ctx) {
    const MarkovGibbsMeasure mu = build_measure(ctx);
    const RoofFunction f = build_roof(ctx);
    const DiscretizationParams params = resolve_discretization(ctx, f, mu);
    const DiscretizedRoof roof = roof_upper(f, params.m, params.delta);
    const SuspensionSFT S =
        build_suspension_sft(ctx.cfg.matrix, roof, std::max(params.m, mu.block_depth()));
    const SuspensionMeasure nu(mu, roof, S);
    const InvarianceReport rep = verify_invariance(nu, ctx.cfg.n_scan);
    std::ostringstream j;
    j << "{\n"
      << "  \"total_mass_error\": " << format_real(rep.total_mass_error) << ",\n"
      << "  \"max_right_error\": " << format_real(rep.max_right_error) << ",\n"
      << "  \"max_left_error\": " << format_real(rep.max_left_error) << ",\n"
      << "  \"cylinders_checked\": " << rep.cylinders_checked << ",\n"
      << "  \"pass\": " << (rep.pass() ? "true" : "false") << "\n}\n";
    ctx.write_artifact("invariance.json", j.str());
    if (!rep.pass()) {
        std::cerr << "invariance scan exceeded tolerance\n";
        return 2;
    }
    return 0;
}

int run_escape_flow(RunContext& ctx) {
    const MarkovGibbsMeasure mu = build_measure(ctx);
    const RoofFunction f = build_roof(ctx);
    const DiscretizationParams params = resolve_discretization(ctx, f, mu);
    const Hole H = require_hole(ctx);
    const FlowEscapeResult r = escape_rate_flow(mu, f, H, params);

    std::string gamma_field;
    if (ctx.cfg.target) gamma_field = format_real(gamma(mu, *ctx.cfg.target));
    std::string mc_estimate, mc_stderr;
    if (ctx.cfg.monte_carlo) {
        const MonteCarloConfig& mc = *ctx.cfg.monte_carlo;
        const MonteCarloResult sim =
            monte_carlo_survival(mu, f, H, mc.time, mc.samples, mc.seed);
        mc_estimate = format_real(sim.estimate);
        mc_stderr = format_real(sim.std_error);
    }
    std::ostringstream csv;
    csv << kResultHeader << "\n"
        << csv_row({std::to_string(H.depth), format_real(params.delta), std::to_string(params.m),
                    format_real(r.rate_lower), format_real(r.rate_upper),
                    format_real(r.hole_measure), format_real(r.slab_measure),
                    format_real(r.ratio_lo), format_real(r.ratio_hi), gamma_field, mc_estimate,
                    mc_stderr});
    ctx.write_artifact("escape_flow.csv", csv.str());
    return 0;
}

int run_theorem_a(RunContext& ctx) {
    const MarkovGibbsMeasure mu = build_measure(ctx);
    const RoofFunction f = build_roof(ctx);
    const DiscretizationParams params = resolve_discretization(ctx, f, mu);
    const NestedHoleSequence seq = build_family(ctx, mu);
    const NestedReport rep = validate_nested(seq, mu);
    if (!rep.all_pass()) throw ValidationError("hole family failed the nested conditions");

    std::ostringstream csv;
    csv << kResultHeader << "\n";
    for (const FlowRatioPoint& p : theorem_a_curve(mu, f, seq, params)) {
        ctx.note("n = " + std::to_string(p.n) + ": ratio [" + format_real(p.flow.ratio_lo) +
                 ", " + format_real(p.flow.ratio_hi) + "]");
        csv << csv_row({std::to_string(p.n), format_real(params.delta), std::to_string(params.m),
                        format_real(p.flow.rate_lower), format_real(p.flow.rate_upper),
                        format_real(p.flow.hole_measure), format_real(p.flow.slab_measure),
                        format_real(p.flow.ratio_lo), format_real(p.flow.ratio_hi),
                        format_real(p.gamma_target), "", ""});
    }
    ctx.write_artifact("theorem_a.csv", csv.str());
    return 0;
}

int run_monte_carlo(RunContext& ctx) {
    const MarkovGibbsMeasure mu = build_measure(ctx);
    const RoofFunction f = build_roof(ctx);
    const Hole H = require_hole(ctx);
    if (!ctx.cfg.monte_carlo) throw ConfigError("config field \"monte_carlo\" is missing");
    const MonteCarloConfig& mc = *ctx.cfg.monte_carlo;
    const MonteCarloResult r = monte_carlo_survival(mu, f, H, mc.time, mc.samples, mc.seed);

    std::ostringstream j;
    j << "{\n"
      << "  \"estimate\": " << format_real(r.estimate) << ",\n"
      << "  \"std_error\": " << format_real(r.std_error) << ",\n"
      << "  \"survivors\": " << r.survivors << ",\n"
      << "  \"samples\": " << r.samples << ",\n"
      << "  \"seed\": " << mc.seed << ",\n"
      << "  \"time\": " << format_real(mc.time) << ",\n"
      << "  \"horizon\": " << r.horizon;
    if (f.f.min_value() == f.f.max_value()) {
        // constant roof: the operator value is exact, report the comparison
        const double mass = flow_survivor_mass_const(mu, f.min_value, H, mc.time);
        j << ",\n  \"operator_mass\": " << format_real(mass);
        if (r.std_error > 0.0)
            j << ",\n  \"deviation_sigmas\": "
              << format_real(std::abs(r.estimate - mass) / r.std_error);
    }
    j << "\n}\n";
    ctx.write_artifact("monte_carlo.json", j.str());
    return 0;
}

void write_manifest(RunContext& ctx, const std::string& subcommand, int status,
                    double seconds) {
    std::ostringstream j;
    j << "{\n"
      << "  \"tool\": {\"name\": \"" << kToolName << "\", \"version\": \"" << kToolVersion
      << "\"},\n"
      << "  \"subcommand\": \"" << subcommand << "\",\n"
      << "  \"config_hash\": \"" << hash_hex(fnv1a(ctx.config_bytes)) << "\",\n"
      << "  \"jobs\": " << ctx.jobs << ",\n"
      << "  \"status\": " << status << ",\n"
      << "  \"timings\": {\"total_seconds\": " << format_real(seconds) << "},\n"
      << "  \"artifacts\": [";
    for (std::size_t i = 0; i < ctx.artifacts.size(); ++i)
        j << (i ? ", " : "") << "\"" << ctx.artifacts[i] << "\"";
    j << "]\n}\n";
    std::filesystem::create_directories(ctx.out);
    std::ofstream f(ctx.out / "manifest.json", std::ios::binary | std::ios::trunc);
    f << j.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"escape rates for open shifts and suspension semi-flows"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = ".";
    int jobs = 0;
    bool verbose = false;
    app.add_option("--config", config_path, "JSON experiment description")->required();
    app.add_option("--out", out_dir, "artifact directory (default: current)");
    app.add_option("--jobs", jobs, "worker threads (0 = all available)");
    app.add_flag("--verbose", verbose, "progress notes on stderr");

    const std::vector<std::pair<std::string, int (*)(RunContext&)>> commands = {
        {"pressure", run_pressure},
        {"gibbs-certify", run_gibbs_certify},
        {"escape-discrete", run_escape_discrete},
        {"validate-nested", run_validate_nested},
        {"build-suspension", run_build_suspension},
        {"verify-invariance", run_verify_invariance},
        {"escape-flow", run_escape_flow},
        {"theorem-a", run_theorem_a},
        {"monte-carlo", run_monte_carlo},
    };
    for (const auto& [name, fn] : commands) {
        (void)fn;
        app.add_subcommand(name)->fallthrough();
    }
    CLI11_PARSE(app, argc, argv);

    RunContext ctx;
    ctx.out = out_dir;
    ctx.jobs = jobs;
    ctx.verbose = verbose;
    const std::string subcommand = app.get_subcommands().front()->get_name();

    const auto t0 = std::chrono::steady_clock::now();
    int status = 0;
    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw ConfigError("config file not readable: " + config_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        ctx.config_bytes = buf.str();
        ctx.cfg = parse_config(ctx.config_bytes);
        if (jobs > 0) escape::kernels::set_thread_count(jobs);
        for (const auto& [name, fn] : commands)
            if (name == subcommand) status = fn(ctx);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        status = 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 2;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(ctx, subcommand, status, seconds);
    return status;
}
