#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pite/learners.hpp"
#include "pite/metrics.hpp"
#include "pite/simgen.hpp"

namespace pite::harness {

using simgen::Mode;
using simgen::ScenarioConfig;

// Full-run configuration (mirrors the CLI config file).
struct RunConfig {
    std::vector<Mode> modes = {Mode::internal};
    bool full_grid = true;
    // custom grid axes, used when full_grid is false
    std::vector<double> mu_values = {0.0};
    std::vector<double> rho_values = {0.0};
    std::vector<int> p_values = {5};
    std::vector<int> n_values = {500};

    std::vector<std::string> learner_names = {"ols", "ridge", "lasso", "enet", "pcr",
                                              "pls", "cart",  "rf",    "gbm"};
    int replications = 20;
    std::uint64_t master_seed = 20250808;
    int workers = 0;  // 0 = hardware concurrency
    int cv_folds = 10;
    std::string output_dir = "pitebench_out";
    bool dump_pairs = false;
    bool dump_populations = false;

    // grid knobs for the expensive ensembles (desk-scale runs)
    int rf_trees = 500;
    int gbm_rounds = 200;

    void validate() const;  // throws std::invalid_argument with the failing field
};

// Cartesian product of the grid axes per mode. The full preset yields 81
// cells for the internal and external-correlated modes (mu x rho x p x n)
// and 27 for the interaction mode (mu x p x n at rho = 0).
std::vector<ScenarioConfig> build_grid(const RunConfig& config);

struct ResultRow {
    Mode mode = Mode::internal;
    double mu_delta = 0.0, rho = 0.0;
    int p = 0, n = 0;
    std::string learner;
    int replication = 0;
    bool ok = false;
    std::string error;          // set when !ok; the row is logged, not dropped
    metrics::MetricReport report;
    int n_eval = 0;             // test-half subjects or matched pairs
    std::optional<double> rmse_obs;  // external modes: rmse of D_hat against O
};

// Per-pair record for the optional matched-pairs dump.
struct PairRecord {
    int pair_id, i_control, i_treated;
    double distance, observed, estimated, truth;
};

struct ReplicationOutput {
    std::vector<ResultRow> rows;  // one per learner, in config order
    // matched-pairs detail per learner (external modes, dump only)
    std::vector<std::vector<PairRecord>> pair_records;
    std::vector<simgen::Population> populations;  // dump only
};

struct ReplicationOptions {
    int rf_trees = 500;
    int gbm_rounds = 200;
    bool keep_pair_records = false;
    bool keep_populations = false;
};

// Executes one (scenario, replication) cell for every learner in the
// scenario. Learner failures are recorded on their row; the rest proceed.
// Output is a pure function of (scenario, rep_index, scenario.master_seed).
ReplicationOutput run_replication(const ScenarioConfig& scenario, int rep_index,
                                  const ReplicationOptions& opts = {});

struct ZoneFlags {
    bool failure = false;
    bool success = false;
};

// Threshold zones per validation mode:
//   internal:             failure rmse >= 5 and dir <= 0.8;  success rmse < 1   and dir > 0.95
//   external-correlated:  failure rmse >= 5 and dir <= 0.8;  success rmse < 2   and dir > 0.95
//   external-interaction: failure rmse >= 2 and dir <= 0.55; success rmse < 1.6 and dir > 0.65
ZoneFlags classify_zones(double rmse_value, double dir_value, Mode mode);

// Complexity-consensus stratification of one replication, pooled later by
// the reporting layer. Learner columns follow the run's learner order; a
// failed learner contributes no flags and its counts are missing.
struct ComplexityRow {
    Mode mode;
    double mu_delta, rho;
    int p, n;
    int replication;
    int class_index;
    int count;
    std::vector<std::optional<int>> correct;  // per learner
};

// Optional per-replication detail retained when the dump flags are set.
struct ReplicationDump {
    Mode mode;
    double mu_delta, rho;
    int p, n;
    int replication;
    std::vector<simgen::Population> populations;        // internal: pop; external: train, val
    std::vector<std::string> pair_learners;             // learners with pair records
    std::vector<std::vector<PairRecord>> pair_records;  // aligned with pair_learners
};

struct GridResult {
    std::vector<ResultRow> rows;             // canonically sorted
    std::vector<ComplexityRow> complexity;   // canonically sorted
    std::vector<std::string> learner_names;  // column order for complexity
    std::vector<ReplicationDump> dumps;      // only when dumping was requested
};

// Runs every (scenario x replication) task on `workers` threads. Each task's
// seeds derive from its key, so output is byte-identical for any worker count.
GridResult run_all(const RunConfig& config, int workers);

// Scenario-level summaries across replications (failures excluded, counted).
struct AggregateRow {
    Mode mode;
    double mu_delta, rho;
    int p, n;
    std::string learner;
    int n_ok = 0, n_err = 0;
    // mean/median/min/max per metric over ok replications
    std::array<double, 4> rmse{}, mae{}, dir{};
    std::array<std::optional<double>, 4> r2{};
    int n_r2 = 0;                      // replications with defined r2
    std::optional<double> alpha_cover;  // fraction of CIs containing 0
    std::optional<double> beta_cover;   // fraction of CIs containing 1
    int n_calib = 0;
};

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

double median(std::vector<double> values);

}  // namespace pite::harness
