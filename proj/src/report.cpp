#include "pite/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "pite/csv.hpp"

namespace pite::report {

namespace fs = std::filesystem;
using io::format_double;
using io::format_optional;
using simgen::Mode;

namespace {

const char* kResultsHeader =
    "mode,mu_delta,rho,p,n,learner,replication,status,n_eval,rmse,mae,r2,dir,"
    "alpha,beta,alpha_se,beta_se,alpha_covers_zero,beta_covers_one,rmse_obs,error";

std::string opt_bool(const std::optional<bool>& b) {
    return b ? (*b ? "1" : "0") : "NA";
}

std::string scrub(std::string text) {
    for (char& c : text)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return text;
}

}  // namespace

std::vector<std::string> results_csv(const std::vector<harness::ResultRow>& rows) {
    std::vector<std::string> lines;
    lines.reserve(rows.size() + 1);
    lines.push_back(kResultsHeader);
    for (const auto& row : rows) {
        std::vector<std::string> f;
        f.push_back(simgen::to_string(row.mode));
        f.push_back(format_double(row.mu_delta));
        f.push_back(format_double(row.rho));
        f.push_back(std::to_string(row.p));
        f.push_back(std::to_string(row.n));
        f.push_back(row.learner);
        f.push_back(std::to_string(row.replication));
        f.push_back(row.ok ? "ok" : "error");
        f.push_back(std::to_string(row.n_eval));
        if (row.ok) {
            f.push_back(format_double(row.report.rmse));
            f.push_back(format_double(row.report.mae));
            f.push_back(format_optional(row.report.r2));
            f.push_back(format_double(row.report.dir));
            f.push_back(format_optional(row.report.alpha));
            f.push_back(format_optional(row.report.beta));
            f.push_back(format_optional(row.report.alpha_se));
            f.push_back(format_optional(row.report.beta_se));
            f.push_back(opt_bool(row.report.alpha_covers_zero));
            f.push_back(opt_bool(row.report.beta_covers_one));
            f.push_back(format_optional(row.rmse_obs));
            f.push_back("");
        } else {
            for (int k = 0; k < 11; ++k) f.push_back("NA");
            f.push_back(scrub(row.error));
        }
        lines.push_back(io::join_csv(f));
    }
    return lines;
}

std::vector<std::string> aggregates_csv(const std::vector<harness::AggregateRow>& rows) {
    std::vector<std::string> lines;
    std::string header = "mode,mu_delta,rho,p,n,learner,n_ok,n_err";
    for (const char* m : {"rmse", "mae", "dir", "r2"})
        for (const char* s : {"mean", "median", "min", "max"})
            header += "," + std::string(m) + "_" + s;
    header += ",n_r2,alpha_cover,beta_cover,n_calib";
    lines.push_back(header);

    for (const auto& a : rows) {
        std::vector<std::string> f;
        f.push_back(simgen::to_string(a.mode));
        f.push_back(format_double(a.mu_delta));
        f.push_back(format_double(a.rho));
        f.push_back(std::to_string(a.p));
        f.push_back(std::to_string(a.n));
        f.push_back(a.learner);
        f.push_back(std::to_string(a.n_ok));
        f.push_back(std::to_string(a.n_err));
        auto push_stats = [&](const std::array<double, 4>& s) {
            for (double v : s) f.push_back(a.n_ok ? format_double(v) : "NA");
        };
        push_stats(a.rmse);
        push_stats(a.mae);
        push_stats(a.dir);
        for (const auto& v : a.r2) f.push_back(format_optional(v));
        f.push_back(std::to_string(a.n_r2));
        f.push_back(format_optional(a.alpha_cover));
        f.push_back(format_optional(a.beta_cover));
        f.push_back(std::to_string(a.n_calib));
        lines.push_back(io::join_csv(f));
    }
    return lines;
}

std::vector<std::string> zones_csv(const std::vector<harness::ResultRow>& rows) {
    std::vector<std::string> lines;
    lines.push_back("mode,mu_delta,rho,p,n,learner,replication,failure,success");
    for (const auto& row : rows) {
        if (!row.ok) continue;
        const auto z = harness::classify_zones(row.report.rmse, row.report.dir, row.mode);
        std::vector<std::string> f = {simgen::to_string(row.mode),
                                      format_double(row.mu_delta),
                                      format_double(row.rho),
                                      std::to_string(row.p),
                                      std::to_string(row.n),
                                      row.learner,
                                      std::to_string(row.replication),
                                      z.failure ? "1" : "0",
                                      z.success ? "1" : "0"};
        lines.push_back(io::join_csv(f));
    }
    return lines;
}

std::vector<std::string> complexity_csv(const std::vector<harness::ComplexityRow>& rows,
                                        const std::vector<std::string>& learner_names) {
    std::vector<std::string> lines;
    std::string header = "mode,mu_delta,rho,p,n,replication,class_index,class,count";
    for (const auto& name : learner_names) header += ",correct_" + name;
    lines.push_back(header);
    for (const auto& row : rows) {
        std::vector<std::string> f = {simgen::to_string(row.mode),
                                      format_double(row.mu_delta),
                                      format_double(row.rho),
                                      std::to_string(row.p),
                                      std::to_string(row.n),
                                      std::to_string(row.replication),
                                      std::to_string(row.class_index),
                                      metrics::kComplexityLabels[row.class_index],
                                      std::to_string(row.count)};
        for (const auto& c : row.correct)
            f.push_back(c ? std::to_string(*c) : std::string("NA"));
        lines.push_back(io::join_csv(f));
    }
    return lines;
}

std::vector<std::string> pairs_csv(const std::vector<harness::PairRecord>& records) {
    std::vector<std::string> lines;
    lines.push_back("pair_id,i_control,i_treated,distance,O,D_hat,D_true");
    for (const auto& r : records) {
        std::vector<std::string> f = {std::to_string(r.pair_id),
                                      std::to_string(r.i_control),
                                      std::to_string(r.i_treated),
                                      format_double(r.distance),
                                      format_double(r.observed),
                                      format_double(r.estimated),
                                      format_double(r.truth)};
        lines.push_back(io::join_csv(f));
    }
    return lines;
}

namespace {

std::string dump_stem(const harness::ReplicationDump& d) {
    return simgen::to_string(d.mode) + "_mu" + format_double(d.mu_delta) + "_rho" +
           format_double(d.rho) + "_p" + std::to_string(d.p) + "_n" + std::to_string(d.n) +
           "_rep" + std::to_string(d.replication);
}

}  // namespace

void write_run_outputs(const std::string& dir, const harness::GridResult& result) {
    fs::create_directories(dir);
    io::write_lines(dir + "/results.csv", results_csv(result.rows));
    io::write_lines(dir + "/aggregates.csv", aggregates_csv(harness::aggregate(result.rows)));
    io::write_lines(dir + "/zones.csv", zones_csv(result.rows));
    io::write_lines(dir + "/complexity.csv",
                    complexity_csv(result.complexity, result.learner_names));

    for (const auto& dump : result.dumps) {
        const std::string stem = dump_stem(dump);
        if (!dump.populations.empty()) {
            fs::create_directories(dir + "/populations");
            const bool external = dump.populations.size() == 2;
            for (size_t i = 0; i < dump.populations.size(); ++i) {
                const char* role = external ? (i == 0 ? "_train" : "_val") : "";
                std::ofstream out(dir + "/populations/" + stem + role + ".csv",
                                  std::ios::binary);
                if (!out) throw std::runtime_error("cannot write population dump");
                simgen::dump_population_csv(dump.populations[i], out);
            }
        }
        if (!dump.pair_records.empty()) {
            fs::create_directories(dir + "/pairs");
            for (size_t k = 0; k < dump.pair_records.size(); ++k)
                io::write_lines(dir + "/pairs/" + stem + "_" + dump.pair_learners[k] + ".csv",
                                pairs_csv(dump.pair_records[k]));
        }
    }
}

namespace {

struct CellStats {
    harness::Mode mode;
    std::string mu, rho, p, n, learner;
    std::vector<double> rmse, mae, dir;
    std::vector<double> r2;
    std::vector<double> alpha_cover, beta_cover;
};

// scenario x learner medians assembled from a parsed results.csv
std::vector<CellStats> collect_cells(const io::CsvTable& results) {
    const int c_mode = results.column("mode");
    const int c_mu = results.column("mu_delta");
    const int c_rho = results.column("rho");
    const int c_p = results.column("p");
    const int c_n = results.column("n");
    const int c_learner = results.column("learner");
    const int c_status = results.column("status");
    const int c_rmse = results.column("rmse");
    const int c_mae = results.column("mae");
    const int c_r2 = results.column("r2");
    const int c_dir = results.column("dir");
    const int c_ac = results.column("alpha_covers_zero");
    const int c_bc = results.column("beta_covers_one");
    if (c_mode < 0 || c_rmse < 0 || c_dir < 0 || c_status < 0)
        throw std::runtime_error("results.csv: missing expected columns");

    std::map<std::string, CellStats> cells;
    for (const auto& row : results.rows) {
        if (row[c_status] != "ok") continue;
        const std::string key = row[c_mode] + "|" + row[c_mu] + "|" + row[c_rho] + "|" +
                                row[c_p] + "|" + row[c_n] + "|" + row[c_learner];
        auto& cell = cells[key];
        if (cell.rmse.empty()) {
            const auto mode = simgen::parse_mode(row[c_mode]);
            if (!mode) throw std::runtime_error("results.csv: bad mode " + row[c_mode]);
            cell.mode = *mode;
            cell.mu = row[c_mu];
            cell.rho = row[c_rho];
            cell.p = row[c_p];
            cell.n = row[c_n];
            cell.learner = row[c_learner];
        }
        cell.rmse.push_back(io::parse_double(row[c_rmse]));
        cell.mae.push_back(io::parse_double(row[c_mae]));
        cell.dir.push_back(io::parse_double(row[c_dir]));
        if (auto v = io::parse_optional(row[c_r2])) cell.r2.push_back(*v);
        if (auto v = io::parse_optional(row[c_ac])) cell.alpha_cover.push_back(*v);
        if (auto v = io::parse_optional(row[c_bc])) cell.beta_cover.push_back(*v);
    }
    std::vector<CellStats> out;
    out.reserve(cells.size());
    for (auto& [key, cell] : cells) out.push_back(std::move(cell));
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

void write_report(const std::string& results_dir) {
    const auto results = io::read_csv(results_dir + "/results.csv");
    const auto cells = collect_cells(results);
    const std::string out_dir = results_dir + "/report";
    fs::create_directories(out_dir);

    // Table layout: mu, rho, model, p, n, RMSE, R2, MAE, DIR, alpha, beta
    std::vector<std::string> failure_lines = {
        "mode,mu_delta,rho,learner,p,n,rmse,r2,mae,dir,alpha_cover,beta_cover"};
    std::vector<std::string> success_lines = {"mode,mu_delta,rho,p,n,learner,success"};
    std::vector<std::string> scatter_lines = {"mode,mu_delta,rho,p,n,learner,rmse,dir,zone"};

    for (const auto& cell : cells) {
        const double rmse_med = harness::median(cell.rmse);
        const double dir_med = harness::median(cell.dir);
        const auto zone = harness::classify_zones(rmse_med, dir_med, cell.mode);
        const std::string mode_name = simgen::to_string(cell.mode);

        if (zone.failure) {
            std::vector<std::string> f = {
                mode_name,
                cell.mu,
                cell.rho,
                cell.learner,
                cell.p,
                cell.n,
                format_double(rmse_med),
                cell.r2.empty() ? "NA" : format_double(harness::median(cell.r2)),
                format_double(harness::median(cell.mae)),
                format_double(dir_med),
                cell.alpha_cover.empty() ? "NA" : format_double(mean_of(cell.alpha_cover)),
                cell.beta_cover.empty() ? "NA" : format_double(mean_of(cell.beta_cover))};
            failure_lines.push_back(io::join_csv(f));
        }
        success_lines.push_back(io::join_csv({mode_name, cell.mu, cell.rho, cell.p, cell.n,
                                              cell.learner, zone.success ? "1" : "0"}));
        scatter_lines.push_back(io::join_csv(
            {mode_name, cell.mu, cell.rho, cell.p, cell.n, cell.learner,
             format_double(rmse_med), format_double(dir_med),
             zone.failure ? "failure" : (zone.success ? "success" : "none")}));
    }
    io::write_lines(out_dir + "/failure_table.csv", failure_lines);
    io::write_lines(out_dir + "/success_conditions.csv", success_lines);
    io::write_lines(out_dir + "/scatter.csv", scatter_lines);

    // zone rectangles for external plotting tools
    std::vector<std::string> rect_lines = {"mode,zone,rmse_lo,rmse_hi,dir_lo,dir_hi"};
    const char* inf = "inf";
    for (Mode mode : {Mode::internal, Mode::external_correlated, Mode::external_interaction}) {
        const std::string m = simgen::to_string(mode);
        const bool inter = mode == Mode::external_interaction;
        const std::string f_rmse = inter ? "2" : "5";
        const std::string f_dir = inter ? "0.55" : "0.8";
        const std::string s_rmse = inter ? "1.6" : (mode == Mode::external_correlated ? "2" : "1");
        const std::string s_dir = inter ? "0.65" : "0.95";
        rect_lines.push_back(io::join_csv({m, "failure", f_rmse, inf, "0", f_dir}));
        rect_lines.push_back(io::join_csv({m, "success", "0", s_rmse, s_dir, "1"}));
    }
    io::write_lines(out_dir + "/zone_rects.csv", rect_lines);

    // pooled complexity table per scenario
    const auto complexity = io::read_csv(results_dir + "/complexity.csv");
    const int x_mode = complexity.column("mode");
    const int x_class = complexity.column("class_index");
    const int x_count = complexity.column("count");
    if (x_mode < 0 || x_class < 0 || x_count < 0)
        throw std::runtime_error("complexity.csv: missing expected columns");
    std::vector<int> learner_cols;
    std::vector<std::string> learner_names;
    for (size_t c = 0; c < complexity.header.size(); ++c) {
        const auto& h = complexity.header[c];
        if (h.rfind("correct_", 0) == 0) {
            learner_cols.push_back(static_cast<int>(c));
            learner_names.push_back(h.substr(8));
        }
    }

    struct Pooled {
        std::array<long, metrics::kComplexityClasses> count{};
        std::vector<std::array<long, metrics::kComplexityClasses>> correct;
        std::vector<std::array<bool, metrics::kComplexityClasses>> any;
    };
    std::map<std::string, Pooled> pooled;
    for (const auto& row : complexity.rows) {
        const std::string key = row[x_mode] + "|" + row[complexity.column("mu_delta")] + "|" +
                                row[complexity.column("rho")] + "|" +
                                row[complexity.column("p")] + "|" + row[complexity.column("n")];
        auto& agg = pooled[key];
        if (agg.correct.empty()) {
            agg.correct.assign(learner_cols.size(), {});
            agg.any.assign(learner_cols.size(), {});
        }
        const int cls = static_cast<int>(io::parse_double(row[x_class]));
        agg.count[cls] += static_cast<long>(io::parse_double(row[x_count]));
        for (size_t k = 0; k < learner_cols.size(); ++k) {
            if (auto v = io::parse_optional(row[learner_cols[k]])) {
                agg.correct[k][cls] += static_cast<long>(*v);
                agg.any[k][cls] = true;
            }
        }
    }

    std::vector<std::string> table_lines;
    std::string header = "scenario,class,number";
    for (const auto& name : learner_names) header += "," + name;
    table_lines.push_back(header);
    for (const auto& [key, agg] : pooled) {
        for (int cls = 0; cls < metrics::kComplexityClasses; ++cls) {
            std::vector<std::string> f = {key, metrics::kComplexityLabels[cls],
                                          std::to_string(agg.count[cls])};
            for (size_t k = 0; k < learner_cols.size(); ++k) {
                if (agg.count[cls] > 0 && agg.any[k][cls])
                    f.push_back(format_double(100.0 * agg.correct[k][cls] / agg.count[cls]));
                else
                    f.push_back("NA");
            }
            table_lines.push_back(io::join_csv(f));
        }
    }
    io::write_lines(out_dir + "/complexity_table.csv", table_lines);
}

}  // namespace pite::report
