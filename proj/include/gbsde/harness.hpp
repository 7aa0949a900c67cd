#ifndef GBSDE_HARNESS_HPP
#define GBSDE_HARNESS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbsde/generator.hpp"
#include "gbsde/lattice.hpp"
#include "gbsde/solver.hpp"
#include "gbsde/terminal.hpp"

namespace gbsde {

inline constexpr const char* kToolVersion = "0.1.0";

// Time-dependent scalar described in a config: "zero", "constant" (value),
// "power_to_horizon" (scale * (T-t)^exponent), or "match_u" (h only).
struct FunctionSpecConfig {
    std::string kind = "zero";
    double value = 0.0;
    double scale = 1.0;
    double exponent = 0.0;
};

struct GeneratorConfig {
    std::string id = "signed_sqrt";
    std::map<std::string, double> params;
    std::optional<FunctionSpecConfig> u;  // overrides the registry default
    std::optional<FunctionSpecConfig> h;
    std::optional<double> L, lambda, M, lipschitz_y;
};

// Complete, serializable experiment description.
struct RunConfig {
    double horizon = 1.0;
    int steps = 200;
    double sigma_lo = 0.5;
    double sigma_hi = 1.0;
    int vol_points = 5;
    double truncation_factor = 5.0;

    GeneratorConfig generator;
    std::string terminal_id = "call";
    std::map<std::string, double> terminal_params = {{"strike", 0.0}};

    std::vector<double> alpha_schedule = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    std::vector<double> epsilon_schedule = {1e-1, 1e-2, 1e-3};
    double tol_root = 1e-12;
    double tol_picard = 1e-12;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    Lattice make_lattice() const;
    GeneratorSpec make_generator_spec() const;
    TerminalSpec make_terminal_spec() const;
    nlohmann::json to_json() const;  // full echo with defaults filled
};

// Strict parsing: unknown fields are errors; close misspellings of a known
// field are suggested in the message.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// ---- alpha-convergence study --------------------------------------------

struct ConvergenceRow {
    double alpha = 0.0;
    double sup_diff = 0.0;  // max over all nodes of |Y_alpha - Y_ref|
    double l2_diff = 0.0;   // sqrt(dt * dx * sum (Y_alpha - Y_ref)^2)
    double z_diff = 0.0;    // same norm on the Z slices
    double runtime_seconds = 0.0;
    bool ok = true;
    std::string error;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double slope = 0.0;  // least-squares log sup_diff against log alpha
    bool sup_monotone = true;
    double reference_root = 0.0;
};

ConvergenceStudy run_convergence(const RunConfig& cfg);

// ---- generator-distance study (discrete M_G^2 gap) -----------------------

struct DistanceRow {
    double alpha = 0.0;
    double distance = 0.0;  // sum_nodes rho * |f - f_alpha|^2 * dt
};

struct DistanceStudy {
    std::vector<DistanceRow> rows;
    bool decreasing = true;
};

DistanceStudy run_generator_distance(const RunConfig& cfg);

// ---- norm audit (uniform-in-alpha boundedness + a-priori bound) ----------

struct NormAuditRow {
    double alpha = 0.0;
    double y_sup_node = 0.0;      // max node |Y_alpha|
    double y_sup_path = 0.0;      // sampled pathwise sup
    double z_h2 = 0.0;            // sqrt of adversarial E[sum |Z|^2 dt]
    double k_sq_estimate = 0.0;   // sampled E[|K_T|^2] under random controls
    long apriori_violations = 0;  // node-wise exponential bound breaches
    double runtime_seconds = 0.0;
};

struct NormAuditStudy {
    std::vector<NormAuditRow> rows;
    std::string verdict;  // "bounded" or "blow-up"
    long total_apriori_violations = 0;
    int path_samples = 0;
};

NormAuditStudy run_norm_audit(const RunConfig& cfg);

// Node-wise a-priori bound: |Y(i,j)|^2 <= e^{2 int_t^T theta} *
// (E_t[xi^2](i,j) + int_t^T h^2 ds) with theta = u + L^2/sigma_lo^2 + 1.
struct AprioriCheck {
    long violations = 0;
    double worst_margin = -1.7976931348623157e308;
};
AprioriCheck check_apriori_bound(const GBSDESolution& sol,
                                 const GeneratorSpec& spec,
                                 const TerminalSpec& terminal,
                                 const Lattice& lattice, double slack = 1e-6);

// ---- stability study ------------------------------------------------------

struct StabilityRow {
    double epsilon = 0.0;
    double max_dy = 0.0;
    double ratio = 0.0;  // max_dy / epsilon (0 at epsilon = 0)
    double bound = 0.0;  // exp(int 2u + L^2/sigma_lo^2)
    bool within_bound = true;
};

struct StabilityStudy {
    std::vector<StabilityRow> rows;
    bool all_within = true;
};

StabilityStudy run_stability(const RunConfig& cfg,
                             const std::vector<double>& epsilon_schedule);

// exp(int_0^T (2u + L^2/sigma_lo^2) ds), by quadrature.
double gronwall_bound(const GeneratorSpec& spec, double horizon, double sigma_lo);

// ---- report emission ------------------------------------------------------

std::string to_csv(const ConvergenceStudy& study);
std::string to_csv(const DistanceStudy& study);
std::string to_csv(const NormAuditStudy& study);
std::string to_csv(const StabilityStudy& study);

nlohmann::json summary_json(const ConvergenceStudy& study);
nlohmann::json summary_json(const DistanceStudy& study);
nlohmann::json summary_json(const NormAuditStudy& study);
nlohmann::json summary_json(const StabilityStudy& study);

// Writes <name>.csv for each (name, content) pair plus manifest.json echoing
// the config, tool version, summary and wall-clock timings. Identical config
// and seed give byte-identical CSVs; timings live only in the manifest.
void write_reports(const std::string& dir,
                   const std::vector<std::pair<std::string, std::string>>& csvs,
                   const nlohmann::json& manifest);

nlohmann::json make_manifest(const std::string& command, const RunConfig& cfg,
                             const nlohmann::json& summary,
                             const std::map<std::string, double>& timings);

}  // namespace gbsde

#endif
