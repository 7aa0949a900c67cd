#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gbsde/errors.hpp"
#include "gbsde/generator.hpp"
#include "gbsde/yosida.hpp"

using namespace gbsde;

namespace {

GeneratorSpec custom(std::function<double(double, double, double)> f,
                     std::function<double(double)> u, double L = 0.0,
                     std::function<double(double)> h = nullptr) {
    GeneratorSpec spec;
    spec.id = "custom";
    spec.f = std::move(f);
    spec.u = std::move(u);
    spec.L = L;
    spec.h = h ? std::move(h) : [](double) { return 0.0; };
    return spec;
}

GeneratorSpec linear_dissipative(double k) {
    // F = f - u*y = -k*y with u == 0
    return custom([k](double, double y, double) { return -k * y; },
                  [](double) { return 0.0; });
}

GeneratorSpec cubic() {
    return custom([](double, double y, double) { return -y * y * y; },
                  [](double) { return 0.0; });
}

}  // namespace

TEST_CASE("dissipative_part removes the monotone drift") {
    const auto exact_cancel = custom(
        [](double, double y, double) { return 0.3 * y; },
        [](double) { return 0.3; });
    CHECK(dissipative_part(exact_cancel, 0.2, 5.0, 1.0) == 0.0);

    const auto shifted = custom(
        [](double, double y, double) { return -2.0 * y + 0.3 * y; },
        [](double) { return 0.3; });
    CHECK(dissipative_part(shifted, 0.0, 3.0, 0.0) ==
          doctest::Approx(-6.0).epsilon(1e-14));

    const auto sqrt_gen = custom(
        [](double, double y, double) {
            return -(y >= 0 ? std::sqrt(y) : -std::sqrt(-y));
        },
        [](double) { return 1.0; });
    CHECK(dissipative_part(sqrt_gen, 0.0, 4.0, 0.0) ==
          doctest::Approx(-6.0).epsilon(1e-14));
}

TEST_CASE("dissipative_part is dissipative for monotone generators") {
    const GeneratorSpec spec = make_generator("piecewise_kink", {}, 1.0);
    std::mt19937_64 rng(5);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53;
    };
    for (int i = 0; i < 500; ++i) {
        const double t = uniform(0.0, 1.0);
        const double y1 = uniform(-10.0, 10.0), y2 = uniform(-10.0, 10.0);
        const double z = uniform(-10.0, 10.0);
        const double prod = (y1 - y2) * (dissipative_part(spec, t, y1, z) -
                                         dissipative_part(spec, t, y2, z));
        CHECK(prod <= 1e-12);
    }
}

TEST_CASE("resolvent: identity when F vanishes") {
    const auto spec = custom([](double, double y, double) { return 0.25 * y; },
                             [](double) { return 0.25; });
    const ResolventResult r = resolvent(spec, 0.7, 0.1, 7.0, 0.0);
    CHECK(r.x == 7.0);
    CHECK(r.residual == 0.0);
}

TEST_CASE("resolvent: linear closed form over random instances") {
    std::mt19937_64 rng(101);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53;
    };
    for (int i = 0; i < 1000; ++i) {
        const double k = uniform(0.0, 10.0);
        const double alpha = std::exp(uniform(std::log(1e-4), 0.0));
        const double y = uniform(-100.0, 100.0);
        const GeneratorSpec spec = linear_dissipative(k);
        const ResolventResult r = resolvent(spec, alpha, 0.0, y, 0.0);
        CHECK(std::abs(r.x - y / (1.0 + alpha * k)) <= 1e-10);
        CHECK(std::abs(r.residual) <= 1e-12);
    }
}

TEST_CASE("resolvent: known linear and cubic instances") {
    const ResolventResult lin = resolvent(linear_dissipative(2.0), 0.5, 0.0, 3.0, 0.0);
    CHECK(lin.x == doctest::Approx(1.5).epsilon(1e-12));

    const ResolventResult cub = resolvent(cubic(), 1.0, 0.0, 2.0, 0.0);
    CHECK(std::abs(cub.x - 1.0) <= 1e-10);
    // verify by substitution
    CHECK(cub.x + cub.x * cub.x * cub.x == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("resolvent rejects bad arguments") {
    CHECK_THROWS_AS(resolvent(linear_dissipative(1.0), 0.0, 0.0, 1.0, 0.0),
                    config_error);
    CHECK_THROWS_AS(resolvent(linear_dissipative(1.0), 0.5, 0.0, 1.0, 0.0, -1.0),
                    config_error);
}

TEST_CASE("resolvent bracket failure on a non-monotone generator") {
    // f = +y^3 violates (H2); the residual map is not increasing and runs away
    const auto bad = custom([](double, double y, double) { return y * y * y; },
                            [](double) { return 0.0; });
    CHECK_THROWS_AS(resolvent(bad, 1.0, 0.0, 2.0, 0.0), bracket_failure);
}

TEST_CASE("yosida_approximant closed forms") {
    const auto zero_f = custom([](double, double y, double) { return 0.1 * y; },
                               [](double) { return 0.1; });
    CHECK(yosida_approximant(zero_f, 0.3, 0.0, 5.0, 0.0) == 0.0);

    CHECK(yosida_approximant(linear_dissipative(2.0), 0.5, 0.0, 3.0, 0.0) ==
          doctest::Approx(-3.0).epsilon(1e-11));
    // domination: |F_alpha| <= |F|
    CHECK(std::abs(yosida_approximant(linear_dissipative(2.0), 0.5, 0.0, 3.0, 0.0)) <=
          6.0 + 1e-10);

    CHECK(yosida_approximant(cubic(), 1.0, 0.0, 2.0, 0.0) ==
          doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("regularized_generator closed forms and limit") {
    const auto pure_drift = custom(
        [](double, double y, double) { return 0.3 * y; },
        [](double) { return 0.3; });
    CHECK(regularized_generator(pure_drift, 0.5, 0.0, 3.0, 0.0) ==
          doctest::Approx(0.9).epsilon(1e-14));

    const auto shifted = custom(
        [](double, double y, double) { return -2.0 * y + 0.3 * y; },
        [](double) { return 0.3; });
    CHECK(regularized_generator(shifted, 0.5, 0.0, 3.0, 0.0) ==
          doctest::Approx(-2.1).epsilon(1e-11));

    // alpha -> 0 on the cubic at y = 2: approaches f(2) = -8 monotonically
    const GeneratorSpec cub = cubic();
    double prev_gap = 1e300;
    for (double alpha : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        const double gap =
            std::abs(regularized_generator(cub, alpha, 0.0, 2.0, 0.0) - (-8.0));
        CHECK(gap <= prev_gap * (1.0 + 1e-9) + 1e-12);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("validate_assumptions accepts the registry generators") {
    for (const char* id : {"zero", "linear_decay", "signed_sqrt", "piecewise_kink"}) {
        const GeneratorSpec spec = make_generator(id, {}, 1.0);
        const ValidationReport report =
            validate_assumptions(spec, 4000, 17, SampleBox::defaults(1.0));
        INFO(id);
        CHECK(report.all_pass());
    }
}

TEST_CASE("validate_assumptions flags a non-monotone generator") {
    const auto bad = custom([](double, double y, double) { return y * y; },
                            [](double) { return 1.0; },
                            0.0, [](double) { return 0.0; });
    const ValidationReport report =
        validate_assumptions(bad, 2000, 23, SampleBox::defaults(1.0));
    CHECK(!report.all_pass());
    const auto& h2 = report.conditions[0];
    CHECK(h2.name == "H2_monotonicity");
    CHECK(!h2.pass);
    REQUIRE(h2.counterexample.has_value());
    // the witness really violates the inequality
    const Witness& w = *h2.counterexample;
    const double lhs = (w.y1 - w.y2) * (bad.f(w.t, w.y1, w.z1) - bad.f(w.t, w.y2, w.z1));
    CHECK(lhs > (w.y1 - w.y2) * (w.y1 - w.y2) * bad.u(w.t));
    CHECK(lhs == doctest::Approx(w.lhs));
}

TEST_CASE("validate_assumptions passes the zero generator") {
    const GeneratorSpec spec = make_generator("zero", {}, 1.0);
    const ValidationReport report =
        validate_assumptions(spec, 1000, 3, SampleBox::defaults(1.0));
    CHECK(report.all_pass());
    CHECK(report.to_json().find("\"all_pass\": true") != std::string::npos);
}

TEST_CASE("u square integral stays within the declared bound") {
    for (const char* id : {"zero", "linear_decay", "signed_sqrt", "piecewise_kink"}) {
        const GeneratorSpec spec = make_generator(id, {}, 1.0);
        CHECK(u_square_integral(spec, 1.0) <= spec.M * (1.0 + 1e-6));
    }
}

TEST_CASE("yosida_audit battery passes on the named generators") {
    for (const char* id : {"linear_decay", "signed_sqrt", "piecewise_kink"}) {
        const GeneratorSpec spec = make_generator(id, {}, 1.0);
        AuditOptions opts;
        opts.samples = 2000;
        opts.seed = 99;
        opts.box = SampleBox::defaults(1.0);
        const AuditReport report = yosida_audit(spec, opts);
        INFO(id);
        REQUIRE(report.inequalities.size() == 12);
        for (const auto& row : report.inequalities) {
            INFO(row.name);
            CHECK(row.violations == 0);
        }
        CHECK(report.pointwise_limit.pass);
        CHECK(report.all_pass());
    }
}

TEST_CASE("audit report serializes with per-condition flags") {
    const GeneratorSpec spec = make_generator("linear_decay", {{"k", 0.5}}, 1.0);
    AuditOptions opts;
    opts.samples = 200;
    opts.seed = 5;
    opts.box = SampleBox::defaults(1.0);
    const AuditReport report = yosida_audit(spec, opts);
    const std::string json = report.to_json();
    CHECK(json.find("J_contraction") != std::string::npos);
    CHECK(json.find("f_alpha_cross_alpha") != std::string::npos);
    CHECK(json.find("pointwise_limit") != std::string::npos);
}

TEST_CASE("validate_assumptions rejects a negative monotonicity rate") {
    auto spec = custom([](double, double y, double) { return -y; },
                       [](double) { return -0.1; });
    const ValidationReport report =
        validate_assumptions(spec, 100, 9, SampleBox::defaults(1.0));
    bool found = false;
    for (const auto& c : report.conditions)
        if (c.name == "u_nonnegative") {
            found = true;
            CHECK(!c.pass);
        }
    CHECK(found);
    CHECK(!report.all_pass());
}

TEST_CASE("resolvent reports an unreachable tolerance honestly") {
    // a curved residual with an irrational root cannot reach a residual of
    // 1e-300; the bracket collapses to machine resolution and the solver says so
    CHECK_THROWS_AS(resolvent(cubic(), 1.0, 0.0, 2.1, 0.0, 1e-300),
                    tolerance_failure);
}
