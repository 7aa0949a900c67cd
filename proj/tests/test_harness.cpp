#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gbsde/errors.hpp"
#include "gbsde/harness.hpp"
#include "gbsde/yosida.hpp"

using namespace gbsde;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
    const RunConfig cfg = parse_config(json::object());
    CHECK(cfg.horizon == 1.0);
    CHECK(cfg.steps == 200);
    CHECK(cfg.sigma_lo == 0.5);
    CHECK(cfg.sigma_hi == 1.0);
    CHECK(cfg.vol_points == 5);
    CHECK(cfg.truncation_factor == 5.0);
    CHECK(cfg.generator.id == "signed_sqrt");
    CHECK(cfg.terminal_id == "call");
    CHECK(cfg.alpha_schedule.size() == 5);
    CHECK(cfg.tol_root == 1e-12);
    CHECK(cfg.seed == 1);
    CHECK(cfg.output_dir == "out");
}

TEST_CASE("full config round-trips") {
    const json doc = {
        {"lattice",
         {{"horizon", 2.0}, {"steps", 50}, {"sigma_lo", 0.25}, {"sigma_hi", 0.75},
          {"vol_points", 3}, {"truncation_factor", 4.0}}},
        {"generator", {{"id", "linear_decay"}, {"params", {{"k", 2.0}}}}},
        {"terminal", {{"id", "quadratic"}}},
        {"alpha_schedule", {0.5, 0.1, 0.02}},
        {"epsilon_schedule", {0.1, 0.001}},
        {"tolerances", {{"root", 1e-10}, {"picard", 1e-11}}},
        {"seed", 77},
        {"output_dir", "reports"}};
    const RunConfig cfg = parse_config(doc);
    CHECK(cfg.horizon == 2.0);
    CHECK(cfg.steps == 50);
    CHECK(cfg.generator.id == "linear_decay");
    CHECK(cfg.generator.params.at("k") == 2.0);
    CHECK(cfg.terminal_id == "quadratic");
    CHECK(cfg.terminal_params.empty());
    CHECK(cfg.alpha_schedule == std::vector<double>{0.5, 0.1, 0.02});
    CHECK(cfg.epsilon_schedule == std::vector<double>{0.1, 0.001});
    CHECK(cfg.tol_root == 1e-10);
    CHECK(cfg.seed == 77);
    CHECK(cfg.output_dir == "reports");

    // the echo carries every field back
    const json echo = cfg.to_json();
    CHECK(echo["lattice"]["steps"] == 50);
    CHECK(echo["generator"]["id"] == "linear_decay");
    CHECK(echo["tolerances"]["picard"] == 1e-11);
}

TEST_CASE("strict parsing rejects unknown fields with a suggestion") {
    try {
        parse_config(json{{"alpha_shedule", {0.1, 0.01}}});
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("alpha_shedule") != std::string::npos);
        CHECK(msg.find("alpha_schedule") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(json{{"lattice", {{"stepz", 10}}}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"generator", {{"identifier", "zero"}}}}),
                    config_error);
}

TEST_CASE("schedule and tolerance validation") {
    CHECK_THROWS_AS(parse_config(json{{"alpha_schedule", {0.1, 0.2}}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"alpha_schedule", {0.1, 0.1}}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"alpha_schedule", {0.1, -0.2}}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"alpha_schedule", json::array()}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"tolerances", {{"root", 0.0}}}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"tolerances", {{"root", -1e-9}}}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"epsilon_schedule", {-0.1}}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"seed", -4}}), config_error);
    CHECK_THROWS_AS(parse_config(json{{"output_dir", ""}}), config_error);
    try {
        parse_config(json{{"alpha_schedule", {0.1, 0.2}}});
    } catch (const config_error& e) {
        CHECK(e.field == "alpha_schedule");
    }
}

TEST_CASE("generator overrides via function specs") {
    const json doc = {
        {"generator",
         {{"id", "linear_decay"},
          {"params", {{"k", 2.0}}},
          {"u", {{"kind", "constant"}, {"value", 0.0}}},
          {"h", {{"kind", "constant"}, {"value", 20.0}}}}}};
    const RunConfig cfg = parse_config(doc);
    const GeneratorSpec spec = cfg.make_generator_spec();
    CHECK(spec.u(0.3) == 0.0);
    CHECK(spec.h(0.9) == 20.0);

    // with u == 0 the dissipative part is -k*y itself: at alpha = 0.5, y = 3
    // the regularized generator is -2*3/(1+0.5*2) = -3, and the pointwise
    // squared distance to f = -6 is 9
    const double fa = regularized_generator(spec, 0.5, 0.0, 3.0, 0.0);
    CHECK(fa == doctest::Approx(-3.0).epsilon(1e-11));
    const double gap = spec.f(0.0, 3.0, 0.0) - fa;
    CHECK(gap * gap == doctest::Approx(9.0).epsilon(1e-10));

    CHECK_THROWS_AS(
        parse_config(json{{"generator", {{"u", {{"kind", "nope"}}}}}}),
        config_error);
    CHECK_THROWS_AS(
        parse_config(json{{"generator", {{"u", {{"kind", "constant"}}}}}}),
        config_error);
}

TEST_CASE("convergence study: zero generator has zero differences") {
    RunConfig cfg;
    cfg.steps = 16;
    cfg.generator.id = "zero";
    cfg.terminal_id = "quadratic";
    cfg.terminal_params.clear();
    cfg.alpha_schedule = {0.1, 0.01};
    const ConvergenceStudy study = run_convergence(cfg);
    REQUIRE(study.rows.size() == 2);
    for (const auto& row : study.rows) {
        CHECK(row.ok);
        CHECK(row.sup_diff == 0.0);
        CHECK(row.l2_diff == 0.0);
        CHECK(row.z_diff == 0.0);
    }
    CHECK(study.sup_monotone);
}

TEST_CASE("convergence study: linear generator converges at first order") {
    RunConfig cfg;
    cfg.steps = 40;
    cfg.vol_points = 3;
    cfg.truncation_factor = 4.0;
    cfg.generator.id = "linear_decay";
    cfg.generator.params = {{"k", 1.0}};
    cfg.terminal_id = "quadratic";
    cfg.terminal_params.clear();
    cfg.alpha_schedule = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    const ConvergenceStudy study = run_convergence(cfg);
    for (std::size_t i = 0; i + 1 < study.rows.size(); ++i)
        CHECK(study.rows[i + 1].sup_diff < study.rows[i].sup_diff);
    CHECK(study.slope > 0.85);
    CHECK(study.slope < 1.15);
    CHECK(study.sup_monotone);
}

TEST_CASE("convergence study: signed_sqrt differences shrink") {
    RunConfig cfg;
    cfg.steps = 24;
    cfg.vol_points = 3;
    cfg.truncation_factor = 4.0;
    cfg.generator.id = "signed_sqrt";
    cfg.terminal_id = "call";
    cfg.terminal_params = {{"strike", 0.0}};
    cfg.alpha_schedule = {1e-1, 1e-2, 1e-3};
    const ConvergenceStudy study = run_convergence(cfg);
    for (std::size_t i = 0; i + 1 < study.rows.size(); ++i)
        CHECK(study.rows[i + 1].sup_diff < study.rows[i].sup_diff);
    CHECK(study.sup_monotone);
}

TEST_CASE("distance study trends to zero") {
    RunConfig cfg;
    cfg.steps = 24;
    cfg.vol_points = 3;
    cfg.truncation_factor = 4.0;
    cfg.generator.id = "signed_sqrt";
    cfg.terminal_id = "call";
    cfg.terminal_params = {{"strike", 0.0}};
    cfg.alpha_schedule = {1e-1, 1e-2, 1e-3};
    const DistanceStudy study = run_generator_distance(cfg);
    REQUIRE(study.rows.size() == 3);
    CHECK(study.decreasing);
    CHECK(study.rows.back().distance < study.rows.front().distance);

    cfg.generator.id = "zero";
    const DistanceStudy zero = run_generator_distance(cfg);
    for (const auto& row : zero.rows) CHECK(row.distance == 0.0);
    CHECK(zero.decreasing);
}

TEST_CASE("norm audit verdicts") {
    RunConfig cfg;
    cfg.steps = 24;
    cfg.vol_points = 3;
    cfg.truncation_factor = 4.0;
    cfg.generator.id = "signed_sqrt";
    cfg.terminal_id = "call";
    cfg.terminal_params = {{"strike", 0.0}};
    cfg.alpha_schedule = {1e-1, 1e-2, 1e-3};
    const NormAuditStudy study = run_norm_audit(cfg);
    CHECK(study.verdict == "bounded");
    CHECK(study.total_apriori_violations == 0);
    for (const auto& row : study.rows) {
        CHECK(row.y_sup_node >= 0.0);
        CHECK(row.z_h2 >= 0.0);
        CHECK(row.k_sq_estimate >= 0.0);
        CHECK(std::isfinite(row.y_sup_node + row.y_sup_path + row.z_h2 +
                            row.k_sq_estimate));
    }

    // degenerate volatility interval: K vanishes under every control
    RunConfig degen;
    degen.steps = 16;
    degen.sigma_lo = 1.0;
    degen.sigma_hi = 1.0;
    degen.vol_points = 2;
    degen.generator.id = "linear_decay";
    degen.generator.params = {{"k", 0.5}};
    degen.terminal_id = "quadratic";
    degen.terminal_params.clear();
    degen.alpha_schedule = {0.1, 0.01};
    const NormAuditStudy dstudy = run_norm_audit(degen);
    CHECK(dstudy.verdict == "bounded");
    for (const auto& row : dstudy.rows) CHECK(row.k_sq_estimate == 0.0);
}

TEST_CASE("stability study obeys the Gronwall bound") {
    RunConfig cfg;
    cfg.steps = 16;
    cfg.generator.id = "zero";
    cfg.terminal_id = "quadratic";
    cfg.terminal_params.clear();

    const StabilityStudy study = run_stability(cfg, {0.1, 0.01, 0.0});
    REQUIRE(study.rows.size() == 3);
    CHECK(study.all_within);
    // constants pass straight through: |dY| == eps at every node
    CHECK(study.rows[0].max_dy == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(study.rows[1].max_dy == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(study.rows[2].max_dy == 0.0);
    CHECK(study.rows[0].bound == doctest::Approx(1.0));

    RunConfig lin = cfg;
    lin.generator.id = "linear_decay";
    lin.generator.params = {{"k", 1.0}};
    const StabilityStudy lstudy = run_stability(lin, {0.1, 0.001});
    CHECK(lstudy.all_within);
    // ratio for the discounted constant shift stays below e^{2kT}
    for (const auto& row : lstudy.rows) CHECK(row.ratio <= row.bound * 1.001);
}

TEST_CASE("gronwall_bound quadrature") {
    const GeneratorSpec zero = make_generator("zero", {}, 1.0);
    CHECK(gronwall_bound(zero, 1.0, 0.5) == doctest::Approx(1.0));
    const GeneratorSpec lin = make_generator("linear_decay", {{"k", 1.0}}, 1.0);
    CHECK(gronwall_bound(lin, 1.0, 0.5) == doctest::Approx(std::exp(2.0)).epsilon(1e-6));
    const GeneratorSpec ss = make_generator("signed_sqrt", {}, 1.0);
    CHECK(gronwall_bound(ss, 1.0, 0.5) ==
          doctest::Approx(std::exp(8.0 / 3.0 + 4.0)).epsilon(1e-3));
}

TEST_CASE("report files are written and byte-stable") {
    RunConfig cfg;
    cfg.steps = 12;
    cfg.vol_points = 3;
    cfg.truncation_factor = 3.0;
    cfg.generator.id = "linear_decay";
    cfg.generator.params = {{"k", 1.0}};
    cfg.terminal_id = "quadratic";
    cfg.terminal_params.clear();
    cfg.alpha_schedule = {0.1, 0.01};

    const ConvergenceStudy s1 = run_convergence(cfg);
    const ConvergenceStudy s2 = run_convergence(cfg);
    CHECK(to_csv(s1) == to_csv(s2));
    CHECK(to_csv(s1).rfind("alpha,sup_diff,l2_diff,z_diff,status\n", 0) == 0);

    const auto dir = std::filesystem::temp_directory_path() /
                     ("gbsde_test_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    const auto manifest = make_manifest("converge", cfg, summary_json(s1),
                                        {{"converge", 0.25}});
    write_reports(dir.string(), {{"converge.csv", to_csv(s1)}}, manifest);
    CHECK(std::filesystem::exists(dir / "converge.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    CHECK(slurp(dir / "converge.csv") == to_csv(s1));

    const json parsed = json::parse(slurp(dir / "manifest.json"));
    CHECK(parsed["command"] == "converge");
    CHECK(parsed["version"] == kToolVersion);
    CHECK(parsed["config"]["lattice"]["steps"] == 12);
    CHECK(parsed["timings_seconds"]["converge"] == 0.25);
    std::filesystem::remove_all(dir);
}

TEST_CASE("study CSV headers") {
    DistanceStudy d;
    d.rows = {{0.1, 0.5}};
    CHECK(to_csv(d) == "alpha,distance\n0.1,0.5\n");
    StabilityStudy s;
    s.rows.push_back({0.1, 0.05, 0.5, 2.0, true});
    CHECK(to_csv(s) == "epsilon,max_dy,ratio,bound,within_bound\n0.1,0.05,0.5,2,1\n");
    NormAuditStudy n;
    NormAuditRow row;
    row.alpha = 0.1;
    n.rows.push_back(row);
    CHECK(to_csv(n).rfind("alpha,y_sup_node,y_sup_path,z_h2,k_sq_estimate,apriori_violations\n", 0) == 0);
}

TEST_CASE("load_config reads files and reports parse failures") {
    const auto path = std::filesystem::temp_directory_path() /
                      ("gbsde_cfg_" + std::to_string(::getpid()) + ".json");
    {
        std::ofstream f(path);
        f << "{\"lattice\": {\"steps\": 8}}";
    }
    const RunConfig cfg = load_config(path.string());
    CHECK(cfg.steps == 8);
    {
        std::ofstream f(path);
        f << "{not json";
    }
    CHECK_THROWS_AS(load_config(path.string()), config_error);
    CHECK_THROWS_AS(load_config("/nonexistent/nowhere.json"), config_error);
    std::filesystem::remove(path);
}

TEST_CASE("norm audit: zero generator keeps the Y sup at the payoff maximum") {
    RunConfig cfg;
    cfg.steps = 16;
    cfg.vol_points = 3;
    cfg.truncation_factor = 3.0;
    cfg.generator.id = "zero";
    cfg.terminal_id = "quadratic";
    cfg.terminal_params.clear();
    cfg.alpha_schedule = {0.1, 0.01, 0.001};
    const NormAuditStudy study = run_norm_audit(cfg);
    const Lattice lat = cfg.make_lattice();
    const double payoff_max = lat.x(lat.halfwidth) * lat.x(lat.halfwidth);
    for (const auto& row : study.rows)
        CHECK(row.y_sup_node == payoff_max);  // identical across alpha
    CHECK(study.verdict == "bounded");
}

TEST_CASE("stability root response matches the linear discount closed form") {
    const Lattice lat = build_lattice(1.0, 50, GConfig{0.5, 1.0}, 3, 4.0);
    const GeneratorSpec spec = make_generator("linear_decay", {{"k", 1.0}}, 1.0);
    const TerminalSpec xi = make_terminal("quadratic");
    const double eps = 0.01;
    TerminalSpec shifted = xi;
    auto payoff = xi.payoff;
    shifted.payoff = [payoff, eps](double x) { return payoff(x) + eps; };
    const GBSDESolution base = solve(spec, xi, lat);
    const GBSDESolution pert = solve(spec, shifted, lat);
    const double expected = eps * std::pow(1.0 + lat.dt, -lat.steps);
    CHECK(pert.root() - base.root() ==
          doctest::Approx(expected).epsilon(1e-9));
}
