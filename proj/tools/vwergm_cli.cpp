// vwergm: command-line front end for the Glauber-dynamics toolkit.
//
// Subcommands
//   analyze        fixed points of lambda and the phase verdict (JSON)
//   critical       critical-curve point and its identity residuals (JSON)
//   exact          kernel diagnostics: gap, t_mix, bottleneck (JSON)
//   simulate       magnetization trajectory (CSV)
//   couple         grand-coupling coalescence times (CSV)
//   sweep          scaling sweep over n with a least-squares fit (CSV + JSON)
//   phase-diagram  phase classification over a (p, alpha1) grid (CSV)
//   curve          lambda / phi / lambda-minus-identity samples (CSV)
//   oracle         full-chain brute-force consistency report, n <= 12 (JSON)
//
// Exit codes: 0 success, 1 usage error, 2 numerical or verification
// failure, 3 cap/timeout. Data goes to stdout or --out FILE; diagnostics and
// the run manifest go to stderr. Rerunning with the manifest's inputs
// reproduces the output bytes exactly.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "vwergm/analysis.hpp"
#include "vwergm/dynamics.hpp"
#include "vwergm/exactchain.hpp"
#include "vwergm/experiments.hpp"
#include "vwergm/model.hpp"

using nlohmann::json;
using namespace vwergm;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitTimeout = 3;

std::string fmt17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char byte : data) {
        h ^= byte;
        h *= 1099511628211ULL;
    }
    return h;
}

// Collects everything the manifest reports; emitted to stderr at the end of
// each command (and next to the output file when one is written).
struct Manifest {
    json root;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    Manifest(int argc, char** argv) {
        root["tool"] = "vwergm";
        root["version"] = kVersion;
        json cmd = json::array();
        for (int i = 0; i < argc; ++i) cmd.push_back(argv[i]);
        root["command_line"] = cmd;
        root["outputs"] = json::array();
    }

    void add_output(const std::string& destination, const std::string& body) {
        char digest[32];
        std::snprintf(digest, sizeof digest, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(body)));
        root["outputs"].push_back(
            {{"path", destination}, {"bytes", body.size()}, {"fnv1a64", digest}});
    }

    void finish(const std::string& out_path) {
        root["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!out_path.empty()) {
            std::ofstream f(out_path + ".manifest.json");
            f << root.dump(2) << '\n';
        }
        std::cerr << "manifest: " << root.dump() << '\n';
    }
};

// Writes the payload to --out FILE or stdout and registers it.
void emit(const std::string& body, const std::string& out_path, Manifest& manifest) {
    if (out_path.empty()) {
        std::cout << body;
        manifest.add_output("stdout", body);
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file " + out_path);
        f << body;
        manifest.add_output(out_path, body);
    }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed, Manifest& manifest) {
    std::uint64_t value;
    if (seed) {
        value = *seed;
    } else {
        std::random_device rd;
        value = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    manifest.root["seed"] = value;
    return value;
}

// --config FILE: a JSON object mirroring the long flag names; explicit flags
// win. Applied by filling unset CLI11 options before parsing finishes.
json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--config", "cannot open " + path);
    json cfg;
    f >> cfg;
    if (!cfg.is_object()) throw CLI::ValidationError("--config", "must hold a JSON object");
    return cfg;
}

void apply_config(CLI::App* cmd, const json& cfg) {
    for (const CLI::Option* opt : cmd->get_options()) {
        const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
        if (name.empty() || name == "config" || name == "help") continue;
        if (opt->count() > 0 || !cfg.contains(name)) continue;
        const json& value = cfg.at(name);
        auto* mutable_opt = const_cast<CLI::Option*>(opt);
        if (value.is_array()) {
            for (const json& item : value)
                mutable_opt->add_result(item.is_string() ? item.get<std::string>() : item.dump());
        } else if (value.is_string()) {
            mutable_opt->add_result(value.get<std::string>());
        } else {
            mutable_opt->add_result(value.dump());
        }
    }
}

json params_json(const ModelParams& params) {
    return {{"n", params.n}, {"p", params.p}, {"alpha1", params.alpha1},
            {"alpha2", params.alpha2}};
}

json fit_json(const ScalingFit& fit) {
    return {{"model", to_string(fit.model)},
            {"coefficient", fit.coefficient},
            {"exponent_or_rate", fit.exponent_or_rate},
            {"r_squared", fit.r_squared},
            {"censored_excluded", fit.censored_excluded},
            {"censored_warning", fit.censored_warning}};
}

std::string rows_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream csv;
    csv << "n,replicate,value,censored\n";
    for (const SweepRow& row : rows)
        csv << row.n << ',' << row.replicate << ',' << fmt17(row.value) << ','
            << (row.censored ? 1 : 0) << '\n';
    return csv.str();
}

struct CommonParams {
    int n = 100;
    double p = 0.5;
    double alpha1 = 0.0;
    double alpha2 = 0.0;

    void attach(CLI::App* cmd, bool with_n = true) {
        if (with_n) cmd->add_option("--n", n, "vertex count");
        cmd->add_option("--p", p, "spin-1 prior probability in (0,1)");
        cmd->add_option("--a1", alpha1, "edge parameter alpha1 >= 0");
        cmd->add_option("--a2", alpha2, "triangle parameter alpha2 >= 0");
    }

    ModelParams build() const { return ModelParams(n, p, alpha1, alpha2); }
};

Start parse_start(const std::string& text) {
    if (text == "allones") return Start::all_ones();
    if (text == "allzeros") return Start::all_zeros();
    if (text.rfind("level:", 0) == 0) return Start::at_level(std::stoi(text.substr(6)));
    throw CLI::ValidationError("--start", "expected allones, allzeros or level:K");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Glauber dynamics on vertex-weighted exponential random graphs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    Manifest manifest(argc, argv);
    int exit_code = kExitOk;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON file mirroring the flags");
        cmd->add_option("--out", out_path, "write data here instead of stdout");
        cmd->add_option("--seed", seed, "64-bit master seed");
        cmd->add_option("--threads", threads, "worker threads for sweeps");
    };

    // ---- analyze ----------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "fixed points and phase (JSON)");
    CommonParams analyze_params;
    analyze_params.attach(analyze);
    add_common(analyze);
    analyze->callback([&] {
        const ModelParams params = analyze_params.build();
        const PhaseReport report = classify_phase(params);
        json out{{"command", "analyze"}, {"params", params_json(params)}};
        out["fixed_points"] = json::array();
        for (const FixedPoint& fp : report.fixed_points)
            out["fixed_points"].push_back(
                {{"c", fp.c}, {"lambda_prime", fp.lambda_prime}, {"kind", to_string(fp.kind)}});
        out["phase"] = to_string(report.phase);
        emit(out.dump(2) + "\n", out_path, manifest);
    });

    // ---- critical ---------------------------------------------------------
    auto* critical = app.add_subcommand("critical", "critical-curve point (JSON)");
    double cbar = 0.5;
    critical->add_option("--cbar", cbar, "inflection location in [1/2, 2/3]")->required();
    add_common(critical);
    critical->callback([&] {
        const CriticalPoint cp = critical_point(cbar);
        const CriticalityReport report = verify_criticality(cp);
        json out{{"command", "critical"},
                 {"cbar", cp.cbar},
                 {"p_c", cp.p_c},
                 {"alpha1_c", cp.alpha1_c},
                 {"alpha2", cp.alpha2},
                 {"residuals",
                  {{"fixed_point", report.fixed_point_residual},
                   {"slope", report.slope_residual},
                   {"second_derivative", report.second_derivative}}},
                 {"third_derivative", report.third_derivative},
                 {"third_derivative_closed_form", report.third_derivative_closed},
                 {"pass", report.pass},
                 {"failures", report.failures}};
        emit(out.dump(2) + "\n", out_path, manifest);
        if (!report.pass) exit_code = kExitNumerical;
    });

    // ---- exact ------------------------------------------------------------
    auto* exact = app.add_subcommand("exact", "kernel, gap, t_mix, bottleneck (JSON)");
    CommonParams exact_params;
    exact_params.attach(exact);
    double epsilon = 0.25;
    std::string starts_text = "extremes";
    std::int64_t cap = 1000000000;
    bool include_kernel = false;
    exact->add_option("--epsilon", epsilon, "TV threshold for t_mix");
    exact->add_option("--starts", starts_text, "t_mix starts: extremes|all");
    exact->add_option("--cap", cap, "step cap for the TV iteration");
    exact->add_flag("--include-kernel", include_kernel, "embed up/down/stay vectors");
    add_common(exact);
    exact->callback([&] {
        const ModelParams params = exact_params.build();
        const MagnetizationKernel kernel = build_kernel(params);
        const StationaryDistribution dist = stationary(params);
        json out{{"command", "exact"}, {"params", params_json(params)}};
        out["detailed_balance_violation"] = check_detailed_balance(kernel, dist);
        const SpectralReport spectral = spectral_gap(kernel, dist);
        out["spectral"] = {{"gap", spectral.gap},
                           {"relaxation_time", spectral.relaxation_time},
                           {"eigenvalue_2", spectral.eigenvalue_2}};
        const BottleneckReport bottleneck = bottleneck_ratio(kernel, dist);
        out["bottleneck"] = {{"phi_star", bottleneck.phi_star},
                             {"log_phi_star", bottleneck.log_phi_star},
                             {"argmin_cut", bottleneck.argmin_cut},
                             {"t_mix_lower_bound", bottleneck.t_mix_lower_bound}};
        if (include_kernel) {
            json up = json::array(), down = json::array(), stay = json::array();
            for (int k = 0; k <= params.n; ++k) {
                up.push_back(kernel.up[k]);
                down.push_back(kernel.down[k]);
                stay.push_back(kernel.stay[k]);
            }
            out["kernel"] = {{"up", up}, {"down", down}, {"stay", stay}};
        }
        const MixingStarts starts =
            starts_text == "all" ? MixingStarts::All : MixingStarts::Extremes;
        try {
            const MixingReport mixing = exact_mixing_time(kernel, dist, epsilon, starts, cap);
            out["mixing"] = {{"epsilon", mixing.epsilon},
                             {"t_mix", mixing.t_mix},
                             {"worst_start", mixing.worst_start}};
        } catch (const CapExceededError& e) {
            out["mixing"] = {{"epsilon", epsilon},
                             {"timed_out", true},
                             {"cap", e.cap},
                             {"d_at_cap", e.distance_at_cap}};
            exit_code = kExitTimeout;
        }
        emit(out.dump(2) + "\n", out_path, manifest);
    });

    // ---- simulate ---------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "magnetization trajectory (CSV)");
    CommonParams sim_params;
    sim_params.attach(simulate);
    std::int64_t steps = 100000;
    std::int64_t stride = 1;
    std::string start_text = "allzeros";
    simulate->add_option("--steps", steps, "number of Glauber updates");
    simulate->add_option("--stride", stride, "record every stride steps");
    simulate->add_option("--start", start_text, "allones|allzeros|level:K");
    add_common(simulate);
    simulate->callback([&] {
        const ModelParams params = sim_params.build();
        const std::uint64_t used_seed = resolve_seed(seed, manifest);
        const Trajectory trajectory =
            run(params, parse_start(start_text), steps, stride, used_seed);
        std::ostringstream csv;
        csv << "step,c\n";
        for (std::size_t i = 0; i < trajectory.magnetizations.size(); ++i)
            csv << static_cast<std::int64_t>(i) * stride << ','
                << fmt17(trajectory.magnetizations[i]) << '\n';
        manifest.root["params"] = params_json(params);
        manifest.root["caps"] = {{"steps", steps}};
        emit(csv.str(), out_path, manifest);
    });

    // ---- couple -----------------------------------------------------------
    auto* couple = app.add_subcommand("couple", "coalescence times (CSV)");
    CommonParams couple_params;
    couple_params.attach(couple);
    int replicas = 100;
    std::int64_t couple_cap = 10000000;
    couple->add_option("--replicas", replicas, "independent coupling runs");
    couple->add_option("--cap", couple_cap, "per-run step cap");
    add_common(couple);
    couple->callback([&] {
        const ModelParams params = couple_params.build();
        const std::uint64_t used_seed = resolve_seed(seed, manifest);
        std::ostringstream csv;
        csv << "replica,tau,censored\n";
        bool any_censored = false;
        for (int r = 0; r < replicas; ++r) {
            const CouplingRun run =
                coupling_time(params, mix64(used_seed, static_cast<std::uint64_t>(r)), couple_cap);
            any_censored |= run.timed_out;
            csv << r << ',' << run.tau << ',' << (run.timed_out ? 1 : 0) << '\n';
        }
        manifest.root["params"] = params_json(params);
        manifest.root["caps"] = {{"per_run", couple_cap}};
        emit(csv.str(), out_path, manifest);
        if (any_censored) exit_code = kExitTimeout;
    });

    // ---- sweep ------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "scaling sweep over n (CSV + fit JSON)");
    CommonParams sweep_params;
    sweep_params.attach(sweep, false);
    std::string kind_text;
    std::vector<int> n_values;
    int sweep_replicas = 1;
    std::int64_t sweep_cap = 1000000000;
    double start_c = 1.0;
    std::optional<double> burnin_target;
    std::string from_text = "lower";
    std::string fit_text;
    std::string fit_out;
    sweep->add_option("--kind", kind_text, "mixing|gap|bottleneck|coupling|burnin|escape")
        ->required();
    sweep->add_option("--n-values", n_values, "strictly increasing system sizes")
        ->required()
        ->delimiter(',');
    sweep->add_option("--replicas", sweep_replicas, "replicas per n (stochastic kinds)");
    sweep->add_option("--cap", sweep_cap, "per-run step cap");
    sweep->add_option("--start-c", start_c, "burn-in start magnetization");
    sweep->add_option("--target", burnin_target, "explicit burn-in target fixed point");
    sweep->add_option("--from", from_text, "escape start attractor: lower|upper");
    sweep->add_option("--fit", fit_text, "optional fit: power|nlogn|exponential");
    sweep->add_option("--fit-out", fit_out, "write the fit JSON here");
    add_common(sweep);
    sweep->callback([&] {
        SweepSpec spec{SweepKind::Gap, sweep_params.p, sweep_params.alpha1, sweep_params.alpha2,
                       n_values};
        if (kind_text == "mixing") spec.kind = SweepKind::Mixing;
        else if (kind_text == "gap") spec.kind = SweepKind::Gap;
        else if (kind_text == "bottleneck") spec.kind = SweepKind::Bottleneck;
        else if (kind_text == "coupling") spec.kind = SweepKind::Coupling;
        else if (kind_text == "burnin") spec.kind = SweepKind::BurnIn;
        else if (kind_text == "escape") spec.kind = SweepKind::Escape;
        else throw CLI::ValidationError("--kind", "unknown sweep kind " + kind_text);
        spec.replicas = sweep_replicas;
        spec.master_seed = resolve_seed(seed, manifest);
        spec.cap = sweep_cap;
        spec.burnin_start_c = start_c;
        spec.burnin_target = burnin_target;
        spec.escape_from = from_text == "upper" ? FromAttractor::Upper : FromAttractor::Lower;
        spec.threads = threads;

        const std::vector<SweepRow> rows = run_sweep(spec);
        manifest.root["caps"] = {{"per_run", sweep_cap}};
        emit(rows_csv(rows), out_path, manifest);

        if (!fit_text.empty()) {
            FitModel model;
            if (fit_text == "power") model = FitModel::PowerLaw;
            else if (fit_text == "nlogn") model = FitModel::NLogN;
            else if (fit_text == "exponential") model = FitModel::Exponential;
            else throw CLI::ValidationError("--fit", "unknown fit model " + fit_text);
            const ScalingFit fit = fit_scaling(aggregate_mean(rows), model);
            const std::string body = fit_json(fit).dump(2) + "\n";
            const std::string target =
                !fit_out.empty() ? fit_out : (out_path.empty() ? "" : out_path + ".fit.json");
            if (target.empty()) {
                std::cout << body;
                manifest.add_output("stdout", body);
            } else {
                std::ofstream f(target);
                f << body;
                manifest.add_output(target, body);
            }
        }
    });

    // ---- phase-diagram ----------------------------------------------------
    auto* diagram = app.add_subcommand("phase-diagram", "(p, alpha1) grid scan (CSV)");
    double d_alpha2 = 0.0;
    double p_min = 0.02, p_max = 0.5;
    double a1_min = 0.0, a1_max = 8.0;
    int p_count = 25, a1_count = 25;
    diagram->add_option("--a2", d_alpha2, "triangle parameter of the slice");
    diagram->add_option("--p-min", p_min);
    diagram->add_option("--p-max", p_max);
    diagram->add_option("--p-count", p_count);
    diagram->add_option("--a1-min", a1_min);
    diagram->add_option("--a1-max", a1_max);
    diagram->add_option("--a1-count", a1_count);
    add_common(diagram);
    diagram->callback([&] {
        if (p_count < 1 || a1_count < 1)
            throw CLI::ValidationError("--p-count/--a1-count", "grid counts must be >= 1");
        auto linspace = [](double lo, double hi, int count) {
            std::vector<double> grid;
            for (int i = 0; i < count; ++i)
                grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
            return grid;
        };
        const auto rows = phase_diagram_scan(d_alpha2, linspace(p_min, p_max, p_count),
                                             linspace(a1_min, a1_max, a1_count));
        std::ostringstream csv;
        csv << "p,alpha1,phase,fixed_points\n";
        for (const PhaseDiagramRow& row : rows)
            csv << fmt17(row.p) << ',' << fmt17(row.alpha1) << ',' << to_string(row.phase) << ','
                << row.fixed_point_count << '\n';
        emit(csv.str(), out_path, manifest);
    });

    // ---- curve ------------------------------------------------------------
    auto* curve = app.add_subcommand("curve", "lambda/phi samples (CSV)");
    CommonParams curve_params;
    curve_params.attach(curve);
    std::string what = "lambda";
    int samples = 101;
    curve->add_option("--what", what, "lambda|phi|lambda_minus_identity");
    curve->add_option("--samples", samples, "grid size including both endpoints");
    add_common(curve);
    curve->callback([&] {
        if (samples < 2) throw CLI::ValidationError("--samples", "need at least 2 samples");
        const ModelParams params = curve_params.build();
        std::ostringstream csv;
        csv << "c,value\n";
        for (int i = 0; i < samples; ++i) {
            const double c = static_cast<double>(i) / (samples - 1);
            double value;
            if (what == "lambda") value = lambda(params, c);
            else if (what == "phi") value = phi(params, c);
            else if (what == "lambda_minus_identity") value = lambda(params, c) - c;
            else throw CLI::ValidationError("--what", "unknown curve " + what);
            csv << fmt17(c) << ',' << fmt17(value) << '\n';
        }
        emit(csv.str(), out_path, manifest);
    });

    // ---- oracle -----------------------------------------------------------
    auto* oracle = app.add_subcommand("oracle", "full-chain brute force, n <= 12 (JSON)");
    CommonParams oracle_params;
    oracle_params.n = 8;
    oracle_params.attach(oracle);
    add_common(oracle);
    oracle->callback([&] {
        const OracleReport report = full_chain_oracle(oracle_params.build());
        json out{{"command", "oracle"},
                 {"n", report.n},
                 {"stationarity_violation", report.stationarity_violation},
                 {"reversibility_violation", report.reversibility_violation},
                 {"kernel_projection_violation", report.kernel_projection_violation},
                 {"level_marginal_violation", report.level_marginal_violation},
                 {"tv_equality_violation", report.tv_equality_violation},
                 {"pass", report.pass},
                 {"detail", report.detail}};
        emit(out.dump(2) + "\n", out_path, manifest);
        if (!report.pass) exit_code = kExitNumerical;
    });

    // Pre-scan for --config so its values can fill unset options.
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") config_path = args[i + 1];
    if (!config_path.empty()) {
        const json cfg = load_config(config_path);
        for (const auto& sub : {analyze, critical, exact, simulate, couple, sweep, diagram,
                                curve, oracle})
            apply_config(sub, cfg);
    }

    CLI11_PARSE(app, argc, argv);
    manifest.finish(out_path);
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const CapExceededError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitTimeout;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
