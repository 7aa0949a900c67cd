#include "gbsde/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "gbsde/csv.hpp"
#include "gbsde/errors.hpp"
#include "gbsde/numerics.hpp"
#include "gbsde/sublinear.hpp"
#include "gbsde/yosida.hpp"

namespace gbsde {

namespace {

using nlohmann::json;

// ---- strict parsing helpers ------------------------------------------------

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

void check_keys(const json& obj, std::initializer_list<const char*> known,
                const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                return key == k;
            }) != known.end())
            continue;
        std::string best;
        std::size_t best_dist = 4;  // suggest only close misspellings
        for (const char* k : known) {
            const std::size_t d = edit_distance(key, k);
            if (d < best_dist) {
                best_dist = d;
                best = k;
            }
        }
        std::string msg = "unknown field '" + join_path(path, key) + "'";
        if (!best.empty()) msg += "; did you mean '" + best + "'?";
        throw config_error(msg, join_path(path, key));
    }
}

double as_double(const json& v, const std::string& path) {
    if (!v.is_number())
        throw config_error("field '" + path + "' must be a number", path);
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer())
        throw config_error("field '" + path + "' must be an integer", path);
    return v.get<int>();
}

std::uint64_t as_uint(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw config_error("field '" + path + "' must be a non-negative integer",
                           path);
    return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string())
        throw config_error("field '" + path + "' must be a string", path);
    return v.get<std::string>();
}

std::map<std::string, double> as_params(const json& v, const std::string& path) {
    if (!v.is_object())
        throw config_error("field '" + path + "' must be an object", path);
    std::map<std::string, double> out;
    for (auto it = v.begin(); it != v.end(); ++it)
        out[it.key()] = as_double(it.value(), join_path(path, it.key()));
    return out;
}

FunctionSpecConfig parse_function_spec(const json& v, const std::string& path) {
    if (!v.is_object())
        throw config_error("field '" + path + "' must be an object", path);
    check_keys(v, {"kind", "value", "scale", "exponent"}, path);
    FunctionSpecConfig fs;
    if (!v.contains("kind"))
        throw config_error("field '" + path + "' needs 'kind'", path);
    fs.kind = as_string(v.at("kind"), join_path(path, "kind"));
    if (fs.kind != "zero" && fs.kind != "constant" &&
        fs.kind != "power_to_horizon" && fs.kind != "match_u")
        throw config_error("field '" + path + "': unknown kind '" + fs.kind + "'",
                           path);
    if (v.contains("value")) fs.value = as_double(v.at("value"), join_path(path, "value"));
    if (v.contains("scale")) fs.scale = as_double(v.at("scale"), join_path(path, "scale"));
    if (v.contains("exponent"))
        fs.exponent = as_double(v.at("exponent"), join_path(path, "exponent"));
    if (fs.kind == "constant" && !v.contains("value"))
        throw config_error("field '" + path + "': kind 'constant' needs 'value'",
                           path);
    return fs;
}

std::function<double(double)> build_function(const FunctionSpecConfig& fs,
                                             double horizon,
                                             std::function<double(double)> u_ref) {
    if (fs.kind == "zero") return [](double) { return 0.0; };
    if (fs.kind == "constant") {
        const double c = fs.value;
        return [c](double) { return c; };
    }
    if (fs.kind == "power_to_horizon") {
        const double scale = fs.scale, expo = fs.exponent, T = horizon;
        return [scale, expo, T](double t) {
            return scale * std::pow(std::max(T - t, 1e-16), expo);
        };
    }
    // match_u
    return u_ref;
}

json function_spec_json(const FunctionSpecConfig& fs) {
    json j{{"kind", fs.kind}};
    if (fs.kind == "constant") j["value"] = fs.value;
    if (fs.kind == "power_to_horizon") {
        j["scale"] = fs.scale;
        j["exponent"] = fs.exponent;
    }
    return j;
}

}  // namespace

// ---- RunConfig --------------------------------------------------------------

Lattice RunConfig::make_lattice() const {
    return build_lattice(horizon, steps, GConfig{sigma_lo, sigma_hi}, vol_points,
                         truncation_factor);
}

GeneratorSpec RunConfig::make_generator_spec() const {
    GeneratorSpec spec = make_generator(generator.id, generator.params, horizon);
    if (generator.u) {
        spec.u = build_function(*generator.u, horizon, spec.u);
        spec.M = u_square_integral(spec, horizon);
        spec.lipschitz_y.reset();  // registry bound no longer applies
    }
    if (generator.h) spec.h = build_function(*generator.h, horizon, spec.u);
    if (generator.L) spec.L = *generator.L;
    if (generator.lambda) spec.lambda = *generator.lambda;
    if (generator.M) spec.M = *generator.M;
    if (generator.lipschitz_y) spec.lipschitz_y = *generator.lipschitz_y;
    return spec;
}

TerminalSpec RunConfig::make_terminal_spec() const {
    return make_terminal(terminal_id, terminal_params);
}

json RunConfig::to_json() const {
    json j;
    j["lattice"] = {{"horizon", horizon},
                    {"steps", steps},
                    {"sigma_lo", sigma_lo},
                    {"sigma_hi", sigma_hi},
                    {"vol_points", vol_points},
                    {"truncation_factor", truncation_factor}};
    json gen{{"id", generator.id}, {"params", json(generator.params)}};
    if (generator.u) gen["u"] = function_spec_json(*generator.u);
    if (generator.h) gen["h"] = function_spec_json(*generator.h);
    if (generator.L) gen["L"] = *generator.L;
    if (generator.lambda) gen["lambda"] = *generator.lambda;
    if (generator.M) gen["M"] = *generator.M;
    if (generator.lipschitz_y) gen["lipschitz_y"] = *generator.lipschitz_y;
    j["generator"] = gen;
    j["terminal"] = {{"id", terminal_id}, {"params", json(terminal_params)}};
    j["alpha_schedule"] = alpha_schedule;
    j["epsilon_schedule"] = epsilon_schedule;
    j["tolerances"] = {{"root", tol_root}, {"picard", tol_picard}};
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    return j;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object())
        throw config_error("config must be a JSON object", "");
    check_keys(doc,
               {"lattice", "generator", "terminal", "alpha_schedule",
                "epsilon_schedule", "tolerances", "seed", "output_dir"},
               "");
    RunConfig cfg;

    if (doc.contains("lattice")) {
        const json& lat = doc.at("lattice");
        if (!lat.is_object())
            throw config_error("field 'lattice' must be an object", "lattice");
        check_keys(lat,
                   {"horizon", "steps", "sigma_lo", "sigma_hi", "vol_points",
                    "truncation_factor"},
                   "lattice");
        if (lat.contains("horizon"))
            cfg.horizon = as_double(lat.at("horizon"), "lattice.horizon");
        if (lat.contains("steps"))
            cfg.steps = as_int(lat.at("steps"), "lattice.steps");
        if (lat.contains("sigma_lo"))
            cfg.sigma_lo = as_double(lat.at("sigma_lo"), "lattice.sigma_lo");
        if (lat.contains("sigma_hi"))
            cfg.sigma_hi = as_double(lat.at("sigma_hi"), "lattice.sigma_hi");
        if (lat.contains("vol_points"))
            cfg.vol_points = as_int(lat.at("vol_points"), "lattice.vol_points");
        if (lat.contains("truncation_factor"))
            cfg.truncation_factor =
                as_double(lat.at("truncation_factor"), "lattice.truncation_factor");
    }

    if (doc.contains("generator")) {
        const json& gen = doc.at("generator");
        if (!gen.is_object())
            throw config_error("field 'generator' must be an object", "generator");
        check_keys(gen, {"id", "params", "u", "h", "L", "lambda", "M", "lipschitz_y"},
                   "generator");
        if (gen.contains("id"))
            cfg.generator.id = as_string(gen.at("id"), "generator.id");
        if (gen.contains("params"))
            cfg.generator.params = as_params(gen.at("params"), "generator.params");
        if (gen.contains("u"))
            cfg.generator.u = parse_function_spec(gen.at("u"), "generator.u");
        if (gen.contains("h"))
            cfg.generator.h = parse_function_spec(gen.at("h"), "generator.h");
        if (gen.contains("L"))
            cfg.generator.L = as_double(gen.at("L"), "generator.L");
        if (gen.contains("lambda"))
            cfg.generator.lambda = as_double(gen.at("lambda"), "generator.lambda");
        if (gen.contains("M"))
            cfg.generator.M = as_double(gen.at("M"), "generator.M");
        if (gen.contains("lipschitz_y"))
            cfg.generator.lipschitz_y =
                as_double(gen.at("lipschitz_y"), "generator.lipschitz_y");
    }

    if (doc.contains("terminal")) {
        const json& term = doc.at("terminal");
        if (!term.is_object())
            throw config_error("field 'terminal' must be an object", "terminal");
        check_keys(term, {"id", "params"}, "terminal");
        if (term.contains("id")) {
            cfg.terminal_id = as_string(term.at("id"), "terminal.id");
            cfg.terminal_params.clear();  // defaults belong to the default id
        }
        if (term.contains("params"))
            cfg.terminal_params = as_params(term.at("params"), "terminal.params");
    }

    if (doc.contains("alpha_schedule")) {
        const json& sched = doc.at("alpha_schedule");
        if (!sched.is_array() || sched.empty())
            throw config_error("field 'alpha_schedule' must be a non-empty array",
                               "alpha_schedule");
        cfg.alpha_schedule.clear();
        for (std::size_t i = 0; i < sched.size(); ++i)
            cfg.alpha_schedule.push_back(
                as_double(sched[i], "alpha_schedule[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 0; i < cfg.alpha_schedule.size(); ++i) {
        if (!(cfg.alpha_schedule[i] > 0.0))
            throw config_error("alpha_schedule entries must be positive",
                               "alpha_schedule");
        if (i > 0 && !(cfg.alpha_schedule[i] < cfg.alpha_schedule[i - 1]))
            throw config_error("alpha_schedule must be strictly decreasing",
                               "alpha_schedule");
    }

    if (doc.contains("epsilon_schedule")) {
        const json& sched = doc.at("epsilon_schedule");
        if (!sched.is_array())
            throw config_error("field 'epsilon_schedule' must be an array",
                               "epsilon_schedule");
        cfg.epsilon_schedule.clear();
        for (std::size_t i = 0; i < sched.size(); ++i) {
            const double e = as_double(
                sched[i], "epsilon_schedule[" + std::to_string(i) + "]");
            if (e < 0.0)
                throw config_error("epsilon_schedule entries must be >= 0",
                                   "epsilon_schedule");
            cfg.epsilon_schedule.push_back(e);
        }
    }

    if (doc.contains("tolerances")) {
        const json& tol = doc.at("tolerances");
        if (!tol.is_object())
            throw config_error("field 'tolerances' must be an object", "tolerances");
        check_keys(tol, {"root", "picard"}, "tolerances");
        if (tol.contains("root"))
            cfg.tol_root = as_double(tol.at("root"), "tolerances.root");
        if (tol.contains("picard"))
            cfg.tol_picard = as_double(tol.at("picard"), "tolerances.picard");
    }
    if (!(cfg.tol_root > 0.0) || !(cfg.tol_picard > 0.0))
        throw config_error("tolerances must be positive", "tolerances");

    if (doc.contains("seed")) cfg.seed = as_uint(doc.at("seed"), "seed");
    if (doc.contains("output_dir")) {
        cfg.output_dir = as_string(doc.at("output_dir"), "output_dir");
        if (cfg.output_dir.empty())
            throw config_error("output_dir must not be empty", "output_dir");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file '" + path + "'", "");
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw config_error("config parse error in '" + path + "': " + e.what(), "");
    }
    return parse_config(doc);
}

// ---- studies ----------------------------------------------------------------

namespace {

double now_seconds(const std::chrono::steady_clock::time_point& from) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - from)
        .count();
}

struct FieldDiff {
    double sup = 0.0;
    double l2 = 0.0;
};

FieldDiff field_diff(const ValueField& a, const ValueField& b,
                     const Lattice& lat) {
    FieldDiff d;
    double sum = 0.0;
    for (int i = 0; i < a.n_slices(); ++i)
        for (int j = -a.halfwidth(); j <= a.halfwidth(); ++j) {
            const double gap = std::abs(a.at(i, j) - b.at(i, j));
            d.sup = std::max(d.sup, gap);
            sum += gap * gap;
        }
    d.l2 = std::sqrt(sum * lat.dt * lat.spacing);
    return d;
}

std::uint64_t path_seed(std::uint64_t base, std::uint64_t stream,
                        std::uint64_t index) {
    return base + 0x9E3779B97F4A7C15ULL * (stream + 1) + index;
}

}  // namespace

ConvergenceStudy run_convergence(const RunConfig& cfg) {
    const Lattice lat = cfg.make_lattice();
    const GeneratorSpec spec = cfg.make_generator_spec();
    const TerminalSpec term = cfg.make_terminal_spec();

    ConvergenceStudy study;
    SolveOptions ref_opts;
    ref_opts.tol = cfg.tol_root;
    const GBSDESolution ref = solve(spec, term, lat, ref_opts);
    study.reference_root = ref.root();

    for (double alpha : cfg.alpha_schedule) {
        ConvergenceRow row;
        row.alpha = alpha;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            SolveOptions opts;
            opts.alpha = alpha;
            opts.tol = cfg.tol_root;
            const GBSDESolution sol = solve(spec, term, lat, opts);
            const FieldDiff dy = field_diff(sol.Y, ref.Y, lat);
            const FieldDiff dz = field_diff(sol.Z, ref.Z, lat);
            row.sup_diff = dy.sup;
            row.l2_diff = dy.l2;
            row.z_diff = dz.l2;
        } catch (const numerical_error& e) {
            row.ok = false;
            row.error = e.what();
        }
        row.runtime_seconds = now_seconds(t0);
        study.rows.push_back(row);
    }

    std::vector<double> lx, ly;
    for (const auto& row : study.rows)
        if (row.ok && row.sup_diff > 0.0) {
            lx.push_back(std::log(row.alpha));
            ly.push_back(std::log(row.sup_diff));
        }
    study.slope = lx.size() >= 2 ? fit_line(lx, ly).first : 0.0;

    int inversions = 0;
    double worst_excess = 0.0;
    for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
        if (!study.rows[i].ok || !study.rows[i + 1].ok) continue;
        const double excess = study.rows[i + 1].sup_diff - study.rows[i].sup_diff;
        if (excess > 0.0) {
            ++inversions;
            worst_excess = std::max(worst_excess, excess);
        }
    }
    study.sup_monotone =
        inversions == 0 ||
        (inversions == 1 && worst_excess <= 10.0 * cfg.tol_root);
    return study;
}

DistanceStudy run_generator_distance(const RunConfig& cfg) {
    const Lattice lat = cfg.make_lattice();
    const GeneratorSpec spec = cfg.make_generator_spec();
    const TerminalSpec term = cfg.make_terminal_spec();
    const int N = lat.steps;
    const int J = lat.halfwidth;

    SolveOptions opts;
    opts.tol = cfg.tol_root;
    const GBSDESolution ref = solve(spec, term, lat, opts);

    DistanceStudy study;
    for (double alpha : cfg.alpha_schedule)
        study.rows.push_back({alpha, 0.0});

    // Forward adversarial occupation measure under sigma_star; the lazy walk
    // keeps all mass on grid nodes.
    std::vector<double> rho(std::size_t(lat.nodes_per_slice()), 0.0);
    std::vector<double> rho_next(rho.size(), 0.0);
    rho[std::size_t(J)] = 1.0;  // root node x = 0

    for (int i = 0; i < N; ++i) {
        const double t = lat.time(i);
        for (int j = -J; j <= J; ++j) {
            const double mass = rho[std::size_t(j + J)];
            if (mass == 0.0) continue;
            const double y = ref.Y.at(i, j);
            const double z = ref.Z.at(i, j);
            const double f_val = spec.f(t, y, z);
            for (std::size_t a = 0; a < study.rows.size(); ++a) {
                const double fa = regularized_generator(
                    spec, study.rows[a].alpha, t, y, z, cfg.tol_root);
                const double gap = f_val - fa;
                study.rows[a].distance += mass * gap * gap * lat.dt;
            }
        }
        // advance the measure
        std::fill(rho_next.begin(), rho_next.end(), 0.0);
        for (int j = -J; j <= J; ++j) {
            const double mass = rho[std::size_t(j + J)];
            if (mass == 0.0) continue;
            const double sigma = ref.sigma_star.at(i, j);
            const double ratio = sigma / lat.vol_bounds.sigma_hi;
            const double q = ratio * ratio;
            const int up = std::min(j + 1, J);
            const int down = std::max(j - 1, -J);
            rho_next[std::size_t(j + J)] += (1.0 - q) * mass;
            rho_next[std::size_t(up + J)] += 0.5 * q * mass;
            rho_next[std::size_t(down + J)] += 0.5 * q * mass;
        }
        std::swap(rho, rho_next);
    }

    for (std::size_t a = 0; a + 1 < study.rows.size(); ++a)
        if (study.rows[a + 1].distance >
            study.rows[a].distance * (1.0 + 1e-12) + 1e-15)
            study.decreasing = false;
    return study;
}

AprioriCheck check_apriori_bound(const GBSDESolution& sol,
                                 const GeneratorSpec& spec,
                                 const TerminalSpec& terminal,
                                 const Lattice& lattice, double slack) {
    const int N = lattice.steps;
    const int J = lattice.halfwidth;
    const ValueField xi_sq = conditional_g_expectation(squared(terminal), lattice);

    // Suffix integrals of h^2 and u over [t_i, T], midpoint rule per step.
    std::vector<double> h2_tail(std::size_t(N) + 1, 0.0);
    std::vector<double> u_tail(std::size_t(N) + 1, 0.0);
    auto h = spec.h;
    auto u = spec.u;
    for (int i = N - 1; i >= 0; --i) {
        h2_tail[i] = h2_tail[i + 1] +
                     midpoint_integral([&h](double s) { const double v = h(s); return v * v; },
                                       lattice.time(i), lattice.time(i + 1), 32);
        u_tail[i] = u_tail[i + 1] +
                    midpoint_integral(u, lattice.time(i), lattice.time(i + 1), 32);
    }

    const double lip_term =
        spec.L * spec.L / (lattice.vol_bounds.sigma_lo * lattice.vol_bounds.sigma_lo) +
        1.0;

    AprioriCheck check;
    for (int i = 0; i <= N; ++i) {
        const double theta_int = u_tail[i] + lip_term * (lattice.horizon - lattice.time(i));
        const double growth = std::exp(2.0 * theta_int);
        for (int j = -J; j <= J; ++j) {
            const double lhs = sol.Y.at(i, j) * sol.Y.at(i, j);
            const double rhs = growth * (xi_sq.at(i, j) + h2_tail[i]) + slack;
            const double margin = lhs - rhs;
            check.worst_margin = std::max(check.worst_margin, margin);
            if (margin > 0.0) ++check.violations;
        }
    }
    return check;
}

NormAuditStudy run_norm_audit(const RunConfig& cfg) {
    const Lattice lat = cfg.make_lattice();
    const GeneratorSpec spec = cfg.make_generator_spec();
    const TerminalSpec term = cfg.make_terminal_spec();
    const int N = lat.steps;
    const int J = lat.halfwidth;

    NormAuditStudy study;
    study.path_samples = 256;
    const int y_paths = 64;

    for (std::size_t a = 0; a < cfg.alpha_schedule.size(); ++a) {
        const double alpha = cfg.alpha_schedule[a];
        const auto t0 = std::chrono::steady_clock::now();
        NormAuditRow row;
        row.alpha = alpha;

        SolveOptions opts;
        opts.alpha = alpha;
        opts.tol = cfg.tol_root;
        const GBSDESolution sol = solve(spec, term, lat, opts);

        for (int i = 0; i <= N; ++i)
            for (int j = -J; j <= J; ++j)
                row.y_sup_node = std::max(row.y_sup_node, std::abs(sol.Y.at(i, j)));

        for (int p = 0; p < y_paths; ++p) {
            const PathRecord rec = simulate_path(
                sol, lat, PathControl::random(path_seed(cfg.seed, a, p)));
            for (double v : rec.y)
                row.y_sup_path = std::max(row.y_sup_path, std::abs(v));
        }

        // Adversarial E[sum |Z|^2 dt] by backward dynamic programming with a
        // per-slice running cost.
        std::vector<double> w_next(std::size_t(lat.nodes_per_slice()), 0.0);
        std::vector<double> w_cur(w_next.size(), 0.0);
        for (int i = N - 1; i >= 0; --i) {
            for (int j = -J; j <= J; ++j) {
                const double z = sol.Z.at(i, j);
                w_cur[std::size_t(j + J)] =
                    z * z * lat.dt +
                    one_step_sup(w_next, lat.x(j), lat).value;
            }
            std::swap(w_next, w_cur);
        }
        row.z_h2 = std::sqrt(std::max(w_next[std::size_t(J)], 0.0));

        double k_sq_sum = 0.0;
        for (int p = 0; p < study.path_samples; ++p) {
            const PathRecord rec = simulate_path(
                sol, lat,
                PathControl::random(path_seed(cfg.seed, 1000 + a, p)));
            const double kt = rec.k_cum.back();
            k_sq_sum += kt * kt;
        }
        row.k_sq_estimate = k_sq_sum / study.path_samples;

        const AprioriCheck apriori = check_apriori_bound(sol, spec, term, lat);
        row.apriori_violations = apriori.violations;
        study.total_apriori_violations += apriori.violations;

        row.runtime_seconds = now_seconds(t0);
        study.rows.push_back(row);
    }

    auto bounded = [&](auto field) {
        if (study.rows.empty()) return true;
        const double first = field(study.rows.front());
        for (const auto& row : study.rows)
            if (field(row) > 2.0 * first + 1e-12) return false;
        return true;
    };
    const bool ok =
        bounded([](const NormAuditRow& r) { return r.y_sup_node; }) &&
        bounded([](const NormAuditRow& r) { return r.z_h2; }) &&
        bounded([](const NormAuditRow& r) { return r.k_sq_estimate; });
    study.verdict = ok ? "bounded" : "blow-up";
    return study;
}

double gronwall_bound(const GeneratorSpec& spec, double horizon, double sigma_lo) {
    auto u = spec.u;
    const double lip_term = spec.L * spec.L / (sigma_lo * sigma_lo);
    const double integral = midpoint_integral(
        [&u, lip_term](double s) { return 2.0 * u(s) + lip_term; }, 0.0, horizon);
    return std::exp(integral);
}

StabilityStudy run_stability(const RunConfig& cfg,
                             const std::vector<double>& epsilon_schedule) {
    const Lattice lat = cfg.make_lattice();
    const GeneratorSpec spec = cfg.make_generator_spec();
    const TerminalSpec term = cfg.make_terminal_spec();

    SolveOptions opts;
    opts.tol = cfg.tol_root;
    const GBSDESolution base = solve(spec, term, lat, opts);
    const double bound = gronwall_bound(spec, lat.horizon, lat.vol_bounds.sigma_lo);

    StabilityStudy study;
    for (double eps : epsilon_schedule) {
        StabilityRow row;
        row.epsilon = eps;
        row.bound = bound;

        // perturbation eta == 1: terminal shifted by eps
        TerminalSpec shifted = term;
        shifted.id = term.id + "_shifted";
        auto payoff = term.payoff;
        shifted.payoff = [payoff, eps](double x) { return payoff(x) + eps; };
        const GBSDESolution pert = solve(spec, shifted, lat, opts);

        for (int i = 0; i <= lat.steps; ++i)
            for (int j = -lat.halfwidth; j <= lat.halfwidth; ++j)
                row.max_dy = std::max(
                    row.max_dy, std::abs(pert.Y.at(i, j) - base.Y.at(i, j)));
        row.ratio = eps > 0.0 ? row.max_dy / eps : 0.0;
        row.within_bound = eps > 0.0 ? row.ratio <= bound * (1.0 + 1e-3)
                                     : row.max_dy == 0.0;
        study.all_within = study.all_within && row.within_bound;
        study.rows.push_back(row);
    }
    return study;
}

// ---- report emission ----------------------------------------------------

std::string to_csv(const ConvergenceStudy& study) {
    std::string out = "alpha,sup_diff,l2_diff,z_diff,status\n";
    for (const auto& r : study.rows) {
        out += format_double(r.alpha);
        out += ',';
        out += format_double(r.sup_diff);
        out += ',';
        out += format_double(r.l2_diff);
        out += ',';
        out += format_double(r.z_diff);
        out += ',';
        out += r.ok ? "ok" : "failed";
        out += '\n';
    }
    return out;
}

std::string to_csv(const DistanceStudy& study) {
    std::string out = "alpha,distance\n";
    for (const auto& r : study.rows) {
        out += format_double(r.alpha);
        out += ',';
        out += format_double(r.distance);
        out += '\n';
    }
    return out;
}

std::string to_csv(const NormAuditStudy& study) {
    std::string out = "alpha,y_sup_node,y_sup_path,z_h2,k_sq_estimate,apriori_violations\n";
    for (const auto& r : study.rows) {
        out += format_double(r.alpha);
        out += ',';
        out += format_double(r.y_sup_node);
        out += ',';
        out += format_double(r.y_sup_path);
        out += ',';
        out += format_double(r.z_h2);
        out += ',';
        out += format_double(r.k_sq_estimate);
        out += ',';
        out += std::to_string(r.apriori_violations);
        out += '\n';
    }
    return out;
}

std::string to_csv(const StabilityStudy& study) {
    std::string out = "epsilon,max_dy,ratio,bound,within_bound\n";
    for (const auto& r : study.rows) {
        out += format_double(r.epsilon);
        out += ',';
        out += format_double(r.max_dy);
        out += ',';
        out += format_double(r.ratio);
        out += ',';
        out += format_double(r.bound);
        out += ',';
        out += r.within_bound ? '1' : '0';
        out += '\n';
    }
    return out;
}

json summary_json(const ConvergenceStudy& study) {
    json rows = json::array();
    for (const auto& r : study.rows)
        rows.push_back({{"alpha", r.alpha},
                        {"sup_diff", r.sup_diff},
                        {"l2_diff", r.l2_diff},
                        {"z_diff", r.z_diff},
                        {"ok", r.ok},
                        {"error", r.error}});
    return {{"slope", study.slope},
            {"sup_monotone", study.sup_monotone},
            {"reference_root", study.reference_root},
            {"rows", rows}};
}

json summary_json(const DistanceStudy& study) {
    json rows = json::array();
    for (const auto& r : study.rows)
        rows.push_back({{"alpha", r.alpha}, {"distance", r.distance}});
    return {{"decreasing", study.decreasing}, {"rows", rows}};
}

json summary_json(const NormAuditStudy& study) {
    json rows = json::array();
    for (const auto& r : study.rows)
        rows.push_back({{"alpha", r.alpha},
                        {"y_sup_node", r.y_sup_node},
                        {"y_sup_path", r.y_sup_path},
                        {"z_h2", r.z_h2},
                        {"k_sq_estimate", r.k_sq_estimate},
                        {"apriori_violations", r.apriori_violations}});
    return {{"verdict", study.verdict},
            {"total_apriori_violations", study.total_apriori_violations},
            {"path_samples", study.path_samples},
            {"rows", rows}};
}

json summary_json(const StabilityStudy& study) {
    json rows = json::array();
    for (const auto& r : study.rows)
        rows.push_back({{"epsilon", r.epsilon},
                        {"max_dy", r.max_dy},
                        {"ratio", r.ratio},
                        {"bound", r.bound},
                        {"within_bound", r.within_bound}});
    return {{"all_within", study.all_within}, {"rows", rows}};
}

void write_reports(const std::string& dir,
                   const std::vector<std::pair<std::string, std::string>>& csvs,
                   const nlohmann::json& manifest) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : csvs)
        write_text_file(dir + "/" + name, content);
    write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

json make_manifest(const std::string& command, const RunConfig& cfg,
                   const nlohmann::json& summary,
                   const std::map<std::string, double>& timings) {
    return {{"command", command},
            {"version", kToolVersion},
            {"config", cfg.to_json()},
            {"summary", summary},
            {"timings_seconds", json(timings)}};
}

}  // namespace gbsde
