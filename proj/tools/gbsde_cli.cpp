#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gbsde/csv.hpp"
#include "gbsde/errors.hpp"
#include "gbsde/harness.hpp"
#include "gbsde/oracles.hpp"
#include "gbsde/sublinear.hpp"
#include "gbsde/yosida.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitProperty = 3;

struct GlobalArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;

    gbsde::RunConfig resolve() const {
        gbsde::RunConfig cfg = config_path.empty() ? gbsde::RunConfig{}
                                                   : gbsde::load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed) cfg.seed = *seed;
        return cfg;
    }
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

int cmd_gexp(const GlobalArgs& args) {
    const gbsde::RunConfig cfg = args.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const gbsde::Lattice lat = cfg.make_lattice();
    const gbsde::TerminalSpec term = cfg.make_terminal_spec();
    const gbsde::ValueField field = gbsde::conditional_g_expectation(term, lat);
    const double root = field.at(0, 0);
    std::map<std::string, double> timings{{"gexp", seconds_since(t0)}};
    gbsde::write_reports(cfg.output_dir,
                         {{"field.csv", gbsde::value_field_csv(field, lat)}},
                         gbsde::make_manifest("gexp", cfg, {{"root", root}}, timings));
    std::cout << "gexp root = " << gbsde::format_double(root) << "\n";
    return kExitOk;
}

int cmd_solve(const GlobalArgs& args, std::optional<double> alpha) {
    const gbsde::RunConfig cfg = args.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const gbsde::Lattice lat = cfg.make_lattice();
    const gbsde::GeneratorSpec spec = cfg.make_generator_spec();
    const gbsde::TerminalSpec term = cfg.make_terminal_spec();
    gbsde::SolveOptions opts;
    opts.alpha = alpha;
    opts.tol = cfg.tol_root;
    const gbsde::GBSDESolution sol = gbsde::solve(spec, term, lat, opts);
    std::map<std::string, double> timings{{"solve", seconds_since(t0)}};
    nlohmann::json summary{{"root", sol.root()}};
    if (alpha) summary["alpha"] = *alpha;
    gbsde::write_reports(cfg.output_dir,
                         {{"Y.csv", gbsde::solution_y_csv(sol)},
                          {"Z.csv", gbsde::solution_z_csv(sol)},
                          {"sigma_star.csv", gbsde::solution_sigma_csv(sol)},
                          {"K.csv", gbsde::solution_k_csv(sol)}},
                         gbsde::make_manifest("solve", cfg, summary, timings));
    std::cout << "solve root = " << gbsde::format_double(sol.root()) << "\n";
    return kExitOk;
}

int cmd_yosida_audit(const GlobalArgs& args, int samples) {
    const gbsde::RunConfig cfg = args.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const gbsde::GeneratorSpec spec = cfg.make_generator_spec();
    gbsde::AuditOptions opts;
    opts.samples = samples;
    opts.seed = cfg.seed;
    opts.tol = cfg.tol_root;
    opts.box = gbsde::SampleBox::defaults(cfg.horizon);
    const gbsde::AuditReport audit = gbsde::yosida_audit(spec, opts);
    const gbsde::ValidationReport assumptions = gbsde::validate_assumptions(
        spec, samples, cfg.seed, gbsde::SampleBox::defaults(cfg.horizon));
    std::map<std::string, double> timings{{"yosida_audit", seconds_since(t0)}};
    gbsde::write_reports(
        cfg.output_dir, {},
        gbsde::make_manifest("yosida-audit", cfg,
                             {{"audit", nlohmann::json::parse(audit.to_json())},
                              {"assumptions",
                               nlohmann::json::parse(assumptions.to_json())}},
                             timings));
    for (const auto& row : audit.inequalities)
        std::cout << (row.pass ? "PASS " : "FAIL ") << row.name
                  << " violations=" << row.violations << "\n";
    std::cout << (audit.pointwise_limit.pass ? "PASS " : "FAIL ")
              << audit.pointwise_limit.name << "\n";
    std::cout << (assumptions.all_pass() ? "PASS " : "FAIL ")
              << "generator_assumptions\n";
    return audit.all_pass() && assumptions.all_pass() ? kExitOk : kExitProperty;
}

int cmd_converge(const GlobalArgs& args) {
    const gbsde::RunConfig cfg = args.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const gbsde::ConvergenceStudy study = gbsde::run_convergence(cfg);
    std::map<std::string, double> timings{{"converge", seconds_since(t0)}};
    for (const auto& row : study.rows)
        timings["alpha_" + gbsde::format_double(row.alpha)] = row.runtime_seconds;
    gbsde::write_reports(cfg.output_dir, {{"converge.csv", gbsde::to_csv(study)}},
                         gbsde::make_manifest("converge", cfg,
                                              gbsde::summary_json(study), timings));
    std::cout << "converge slope = " << gbsde::format_double(study.slope)
              << (study.sup_monotone ? " (monotone)" : " (NOT monotone)") << "\n";
    bool any_failed = false;
    for (const auto& row : study.rows) any_failed = any_failed || !row.ok;
    if (any_failed) return kExitNumerical;
    return study.sup_monotone ? kExitOk : kExitProperty;
}

int cmd_distance(const GlobalArgs& args) {
    const gbsde::RunConfig cfg = args.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const gbsde::DistanceStudy study = gbsde::run_generator_distance(cfg);
    std::map<std::string, double> timings{{"distance", seconds_since(t0)}};
    gbsde::write_reports(cfg.output_dir, {{"distance.csv", gbsde::to_csv(study)}},
                         gbsde::make_manifest("distance", cfg,
                                              gbsde::summary_json(study), timings));
    std::cout << "distance rows = " << study.rows.size()
              << (study.decreasing ? " (decreasing)" : " (NOT decreasing)") << "\n";
    return study.decreasing ? kExitOk : kExitProperty;
}

int cmd_norms(const GlobalArgs& args) {
    const gbsde::RunConfig cfg = args.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const gbsde::NormAuditStudy study = gbsde::run_norm_audit(cfg);
    std::map<std::string, double> timings{{"norms", seconds_since(t0)}};
    gbsde::write_reports(cfg.output_dir, {{"norms.csv", gbsde::to_csv(study)}},
                         gbsde::make_manifest("norms", cfg,
                                              gbsde::summary_json(study), timings));
    std::cout << "norms verdict = " << study.verdict << ", apriori violations = "
              << study.total_apriori_violations << "\n";
    return (study.verdict == "bounded" && study.total_apriori_violations == 0)
               ? kExitOk
               : kExitProperty;
}

int cmd_stability(const GlobalArgs& args) {
    const gbsde::RunConfig cfg = args.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const gbsde::StabilityStudy study =
        gbsde::run_stability(cfg, cfg.epsilon_schedule);
    std::map<std::string, double> timings{{"stability", seconds_since(t0)}};
    gbsde::write_reports(cfg.output_dir, {{"stability.csv", gbsde::to_csv(study)}},
                         gbsde::make_manifest("stability", cfg,
                                              gbsde::summary_json(study), timings));
    std::cout << "stability " << (study.all_within ? "within" : "OUTSIDE")
              << " the Gronwall bound\n";
    return study.all_within ? kExitOk : kExitProperty;
}

int cmd_oracle_check(const GlobalArgs& args, bool quick) {
    const gbsde::RunConfig cfg = args.resolve();
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = gbsde::run_oracle_battery(!quick);
    bool all_pass = true;
    for (const auto& r : reports) {
        all_pass = all_pass && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.instance
                  << " gap=" << gbsde::format_double(r.gap) << "\n";
    }
    std::map<std::string, double> timings{{"oracle_check", seconds_since(t0)}};
    const nlohmann::json summary{
        {"all_pass", all_pass},
        {"reports", nlohmann::json::parse(gbsde::oracle_reports_json(reports))}};
    gbsde::write_reports(cfg.output_dir, {},
                         gbsde::make_manifest("oracle-check", cfg, summary, timings));
    return all_pass ? kExitOk : kExitProperty;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice laboratory for G-BSDEs with monotone generators"};
    app.require_subcommand(1);

    GlobalArgs args;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Override the config seed");
    app.add_option("--config", args.config_path, "Path to a JSON run config");
    app.add_option("--out", args.out_dir, "Output directory override");

    auto* gexp = app.add_subcommand("gexp", "Sublinear expectation of a payoff");
    auto* solve = app.add_subcommand("solve", "One G-BSDE solve");
    double alpha_value = 0.0;
    auto* alpha_opt =
        solve->add_option("--alpha", alpha_value, "Yosida regularization level");
    auto* audit = app.add_subcommand("yosida-audit",
                                     "Resolvent/approximant property battery");
    int samples = 10000;
    audit->add_option("--samples", samples, "Samples per inequality");
    auto* converge = app.add_subcommand("converge", "Alpha-convergence study");
    auto* distance = app.add_subcommand("distance", "Generator-distance study");
    auto* norms = app.add_subcommand("norms", "Uniform-in-alpha norm audit");
    auto* stability = app.add_subcommand("stability", "Terminal perturbation study");
    auto* oracle = app.add_subcommand("oracle-check", "Run the oracle battery");
    bool quick = false;
    oracle->add_flag("--quick", quick, "Skip the heaviest brute-force instances");

    for (auto* sub : {gexp, solve, audit, converge, distance, norms, stability, oracle})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfig : kExitOk;
    }

    if (*seed_opt) args.seed = seed_value;

    try {
        if (gexp->parsed()) return cmd_gexp(args);
        if (solve->parsed())
            return cmd_solve(args, *alpha_opt ? std::optional<double>(alpha_value)
                                              : std::nullopt);
        if (audit->parsed()) return cmd_yosida_audit(args, samples);
        if (converge->parsed()) return cmd_converge(args);
        if (distance->parsed()) return cmd_distance(args);
        if (norms->parsed()) return cmd_norms(args);
        if (stability->parsed()) return cmd_stability(args);
        if (oracle->parsed()) return cmd_oracle_check(args, quick);
    } catch (const gbsde::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const gbsde::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
