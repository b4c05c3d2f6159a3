#include "pite/harness.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "pite/engine.hpp"
#include "pite/matcher.hpp"

namespace pite::harness {

void RunConfig::validate() const {
    if (modes.empty()) throw std::invalid_argument("config: modes must not be empty");
    if (learner_names.empty()) throw std::invalid_argument("config: learners must not be empty");
    for (const auto& name : learner_names)
        if (!learners::parse_learner(name))
            throw std::invalid_argument("config: unknown learner '" + name + "'");
    if (replications < 1) throw std::invalid_argument("config: replications must be positive");
    if (cv_folds < 2) throw std::invalid_argument("config: cv_folds must be at least 2");
    if (workers < 0) throw std::invalid_argument("config: workers must be nonnegative");
    if (rf_trees < 1) throw std::invalid_argument("config: rf_trees must be positive");
    if (gbm_rounds < 1) throw std::invalid_argument("config: gbm_rounds must be positive");
    if (!full_grid) {
        if (mu_values.empty() || rho_values.empty() || p_values.empty() || n_values.empty())
            throw std::invalid_argument("config: custom grid axes must not be empty");
    }
}

std::vector<ScenarioConfig> build_grid(const RunConfig& config) {
    config.validate();

    static const std::vector<double> full_mu = {0.0, 0.25, 0.5};
    static const std::vector<double> full_rho = {0.0, 0.5, 0.95};
    static const std::vector<int> full_p = {5, 15, 45};
    static const std::vector<int> full_n = {250, 500, 750};
    static const std::vector<int> full_n_interaction = {500, 750, 1000};

    std::vector<ScenarioConfig> grid;
    for (Mode mode : config.modes) {
        const bool interaction = mode == Mode::external_interaction;
        const auto& mus = config.full_grid ? full_mu : config.mu_values;
        const auto& rhos = interaction ? std::vector<double>{0.0}
                                       : (config.full_grid ? full_rho : config.rho_values);
        const auto& ps = config.full_grid ? full_p : config.p_values;
        const auto& ns = config.full_grid
                             ? (interaction ? full_n_interaction : full_n)
                             : config.n_values;
        for (double mu : mus)
            for (double rho : rhos)
                for (int p : ps)
                    for (int n : ns) {
                        ScenarioConfig s;
                        s.mode = mode;
                        s.mu_delta = mu;
                        s.rho = rho;
                        s.p = p;
                        s.n = n;
                        s.replications = config.replications;
                        s.master_seed = config.master_seed;
                        s.learners = config.learner_names;
                        s.cv_folds = config.cv_folds;
                        s.validate();
                        grid.push_back(std::move(s));
                    }
    }
    return grid;
}

namespace {

learners::LearnerSpec make_spec(const std::string& name, int cv_folds,
                                const ReplicationOptions& opts) {
    learners::LearnerSpec spec;
    const auto id = learners::parse_learner(name);
    if (!id) throw std::invalid_argument("unknown learner '" + name + "'");
    spec.id = *id;
    spec.cv_folds = cv_folds;
    spec.grid.rf_trees = opts.rf_trees;
    spec.grid.gbm_rounds = opts.gbm_rounds;
    return spec;
}

ResultRow base_row(const ScenarioConfig& s, const std::string& learner, int rep) {
    ResultRow row;
    row.mode = s.mode;
    row.mu_delta = s.mu_delta;
    row.rho = s.rho;
    row.p = s.p;
    row.n = s.n;
    row.learner = learner;
    row.replication = rep;
    return row;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& rows) {
    Eigen::VectorXd out(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) out(i) = v(rows[i]);
    return out;
}

}  // namespace

ReplicationOutput run_replication(const ScenarioConfig& scenario, int rep_index,
                                  const ReplicationOptions& opts) {
    scenario.validate();
    if (scenario.learners.empty())
        throw std::invalid_argument("run_replication: scenario has no learners");

    const std::uint64_t rep_base =
        derive(derive(scenario.master_seed, scenario.key()), static_cast<std::uint64_t>(rep_index));

    ReplicationOutput out;
    out.rows.reserve(scenario.learners.size());

    if (scenario.mode == Mode::internal) {
        const auto pop = simgen::generate_population(scenario, derive(rep_base, "pop"));
        Rng split_rng(derive(rep_base, "split"));
        const auto [train, test] = engine::internal_split(pop, split_rng);
        const auto [d0, d1] = engine::split_by_arm(train);
        if (opts.keep_populations) out.populations.push_back(pop);

        for (const auto& name : scenario.learners) {
            ResultRow row = base_row(scenario, name, rep_index);
            try {
                const auto spec = make_spec(name, scenario.cv_folds, opts);
                const auto pair =
                    engine::fit_pair(spec, d0, d1, derive(rep_base, "fit:" + name));
                const Eigen::VectorXd est = engine::predict_pite(pair, test.X);
                row.report = metrics::compute_report(est, test.delta_true);
                row.n_eval = test.n();
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            out.rows.push_back(std::move(row));
        }
        return out;
    }

    // external modes: train on one population, validate on an independent one
    // sharing the structural parameters (beta0 and, in interaction mode, the
    // selected effect columns); covariates, beta_delta, assignments and
    // outcomes are fresh draws.
    const auto train = simgen::generate_population(scenario, derive(rep_base, "train"));
    simgen::GenOverrides ov;
    ov.beta0 = train.beta0;
    if (scenario.mode == Mode::external_interaction) ov.w_indices = train.w_indices;
    const auto val = simgen::generate_population(scenario, derive(rep_base, "val"), ov);
    if (opts.keep_populations) {
        out.populations.push_back(train);
        out.populations.push_back(val);
    }

    const auto [val_control, val_treated] = engine::split_by_arm(val);
    const auto match = matcher::match_nn(val_treated.X, val_control.X);
    const Eigen::VectorXd delta_treated = gather(val.delta_true, val_treated.rows);

    const auto [d0, d1] = engine::split_by_arm(train);
    if (opts.keep_pair_records) out.pair_records.resize(scenario.learners.size());

    for (size_t li = 0; li < scenario.learners.size(); ++li) {
        const auto& name = scenario.learners[li];
        ResultRow row = base_row(scenario, name, rep_index);
        try {
            const auto spec = make_spec(name, scenario.cv_folds, opts);
            const auto pair = engine::fit_pair(spec, d0, d1, derive(rep_base, "fit:" + name));
            const Eigen::VectorXd yhat1 = pair.model_t->predict(val_treated.X);
            const Eigen::VectorXd yhat0 = pair.model_c->predict(val_control.X);
            const auto eff = matcher::pairwise_effects(match, val_treated.y, val_control.y,
                                                       yhat1, yhat0, delta_treated);
            row.report = metrics::compute_report(eff.estimated, eff.truth);
            row.rmse_obs = metrics::rmse(eff.estimated, eff.observed);
            row.n_eval = static_cast<int>(match.pairs.size());
            row.ok = true;
            if (opts.keep_pair_records) {
                auto& records = out.pair_records[li];
                records.resize(match.pairs.size());
                for (size_t k = 0; k < match.pairs.size(); ++k)
                    records[k] = {static_cast<int>(k),   match.pairs[k].first,
                                  match.pairs[k].second, match.distances[k],
                                  eff.observed(k),       eff.estimated(k),
                                  eff.truth(k)};
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

ZoneFlags classify_zones(double rmse_value, double dir_value, Mode mode) {
    ZoneFlags z;
    switch (mode) {
        case Mode::internal:
            z.failure = rmse_value >= 5.0 && dir_value <= 0.8;
            z.success = rmse_value < 1.0 && dir_value > 0.95;
            break;
        case Mode::external_correlated:
            z.failure = rmse_value >= 5.0 && dir_value <= 0.8;
            z.success = rmse_value < 2.0 && dir_value > 0.95;
            break;
        case Mode::external_interaction:
            z.failure = rmse_value >= 2.0 && dir_value <= 0.55;
            z.success = rmse_value < 1.6 && dir_value > 0.65;
            break;
    }
    if (z.failure && z.success)
        throw std::logic_error("classify_zones: zones must be disjoint");
    return z;
}

namespace {

int mode_rank(Mode m) { return static_cast<int>(m); }

bool row_less(const ResultRow& a, const ResultRow& b) {
    return std::tie(a.mu_delta, a.rho, a.p, a.n, a.learner, a.replication) <
           std::tie(b.mu_delta, b.rho, b.p, b.n, b.learner, b.replication);
}

}  // namespace

GridResult run_all(const RunConfig& config, int workers) {
    config.validate();
    const auto scenarios = build_grid(config);
    const int reps = config.replications;
    const int n_tasks = static_cast<int>(scenarios.size()) * reps;

    ReplicationOptions opts;
    opts.rf_trees = config.rf_trees;
    opts.gbm_rounds = config.gbm_rounds;
    opts.keep_pair_records = config.dump_pairs;
    opts.keep_populations = config.dump_populations;

    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min(workers, n_tasks);

    std::vector<ReplicationOutput> outputs(n_tasks);
    std::atomic<int> next{0};
    auto worker_loop = [&]() {
        for (;;) {
            const int task = next.fetch_add(1);
            if (task >= n_tasks) break;
            const auto& scenario = scenarios[task / reps];
            const int rep = task % reps;
            try {
                outputs[task] = run_replication(scenario, rep, opts);
            } catch (const std::exception& e) {
                // configuration-level failure: every learner row logs it
                ReplicationOutput failed;
                for (const auto& name : scenario.learners) {
                    ResultRow row = base_row(scenario, name, rep);
                    row.error = e.what();
                    failed.rows.push_back(std::move(row));
                }
                outputs[task] = std::move(failed);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker_loop);
    worker_loop();
    for (auto& t : pool) t.join();

    GridResult result;
    result.learner_names = config.learner_names;
    for (int task = 0; task < n_tasks; ++task) {
        auto& rep_out = outputs[task];

        // consensus across the learners that succeeded in this replication
        std::vector<std::vector<std::uint8_t>> flags;
        std::vector<size_t> ok_index;
        for (size_t li = 0; li < rep_out.rows.size(); ++li) {
            if (rep_out.rows[li].ok && !rep_out.rows[li].report.dir_flags.empty()) {
                flags.push_back(rep_out.rows[li].report.dir_flags);
                ok_index.push_back(li);
            }
        }
        if (!flags.empty()) {
            const auto table = metrics::complexity_table(flags);
            const auto& scenario = scenarios[task / reps];
            for (int cls = 0; cls < metrics::kComplexityClasses; ++cls) {
                ComplexityRow crow;
                crow.mode = scenario.mode;
                crow.mu_delta = scenario.mu_delta;
                crow.rho = scenario.rho;
                crow.p = scenario.p;
                crow.n = scenario.n;
                crow.replication = task % reps;
                crow.class_index = cls;
                crow.count = table.count[cls];
                crow.correct.assign(config.learner_names.size(), std::nullopt);
                for (size_t k = 0; k < ok_index.size(); ++k)
                    crow.correct[ok_index[k]] = table.correct[k][cls];
                result.complexity.push_back(std::move(crow));
            }
        }
        if (!rep_out.populations.empty() || !rep_out.pair_records.empty()) {
            const auto& scenario = scenarios[task / reps];
            ReplicationDump dump;
            dump.mode = scenario.mode;
            dump.mu_delta = scenario.mu_delta;
            dump.rho = scenario.rho;
            dump.p = scenario.p;
            dump.n = scenario.n;
            dump.replication = task % reps;
            dump.populations = std::move(rep_out.populations);
            for (size_t li = 0; li < rep_out.pair_records.size(); ++li) {
                if (rep_out.pair_records[li].empty()) continue;
                dump.pair_learners.push_back(scenario.learners[li]);
                dump.pair_records.push_back(std::move(rep_out.pair_records[li]));
            }
            result.dumps.push_back(std::move(dump));
        }
        for (auto& row : rep_out.rows) result.rows.push_back(std::move(row));
    }

    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const ResultRow& a, const ResultRow& b) {
                         if (mode_rank(a.mode) != mode_rank(b.mode))
                             return mode_rank(a.mode) < mode_rank(b.mode);
                         return row_less(a, b);
                     });
    std::stable_sort(result.complexity.begin(), result.complexity.end(),
                     [](const ComplexityRow& a, const ComplexityRow& b) {
                         return std::tie(a.mode, a.mu_delta, a.rho, a.p, a.n, a.replication,
                                         a.class_index) <
                                std::tie(b.mode, b.mu_delta, b.rho, b.p, b.n, b.replication,
                                         b.class_index);
                     });
    return result;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty input");
    std::sort(values.begin(), values.end());
    const size_t m = values.size();
    return m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

namespace {

std::array<double, 4> summary(const std::vector<double>& v) {
    double sum = 0.0, lo = v[0], hi = v[0];
    for (double x : v) {
        sum += x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return {sum / static_cast<double>(v.size()), median(v), lo, hi};
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
    // group rows sharing (mode, mu, rho, p, n, learner); input order is kept
    std::vector<AggregateRow> out;
    size_t start = 0;
    while (start < rows.size()) {
        size_t end = start;
        auto same_cell = [&](const ResultRow& a, const ResultRow& b) {
            return a.mode == b.mode && a.mu_delta == b.mu_delta && a.rho == b.rho && a.p == b.p &&
                   a.n == b.n && a.learner == b.learner;
        };
        while (end < rows.size() && same_cell(rows[start], rows[end])) ++end;

        AggregateRow agg;
        agg.mode = rows[start].mode;
        agg.mu_delta = rows[start].mu_delta;
        agg.rho = rows[start].rho;
        agg.p = rows[start].p;
        agg.n = rows[start].n;
        agg.learner = rows[start].learner;

        std::vector<double> rmse_v, mae_v, dir_v, r2_v;
        int alpha_hits = 0, beta_hits = 0, calib_n = 0;
        for (size_t i = start; i < end; ++i) {
            const auto& row = rows[i];
            if (!row.ok) {
                ++agg.n_err;
                continue;
            }
            ++agg.n_ok;
            rmse_v.push_back(row.report.rmse);
            mae_v.push_back(row.report.mae);
            dir_v.push_back(row.report.dir);
            if (row.report.r2) r2_v.push_back(*row.report.r2);
            if (row.report.alpha_covers_zero) {
                ++calib_n;
                alpha_hits += *row.report.alpha_covers_zero ? 1 : 0;
                beta_hits += *row.report.beta_covers_one ? 1 : 0;
            }
        }
        if (agg.n_ok > 0) {
            agg.rmse = summary(rmse_v);
            agg.mae = summary(mae_v);
            agg.dir = summary(dir_v);
        }
        agg.n_r2 = static_cast<int>(r2_v.size());
        if (!r2_v.empty()) {
            const auto s = summary(r2_v);
            for (int k = 0; k < 4; ++k) agg.r2[k] = s[k];
        }
        agg.n_calib = calib_n;
        if (calib_n > 0) {
            agg.alpha_cover = static_cast<double>(alpha_hits) / calib_n;
            agg.beta_cover = static_cast<double>(beta_hits) / calib_n;
        }
        out.push_back(std::move(agg));
        start = end;
    }
    return out;
}

}  // namespace pite::harness
