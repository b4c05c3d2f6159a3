// pitebench: simulation benchmark for predicted individual treatment effects.
//
// Subcommands:
//   run     execute a simulation grid from a JSON config and write CSV results
//   verify  run the metric-identity suite and report each gap vs tolerance
//   report  build derived tables (failure/success/scatter/complexity) from a run
//
// Exit codes: 0 success, 1 validation error, 2 identity-suite failure, 3 I/O error.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "pite/csv.hpp"
#include "pite/harness.hpp"
#include "pite/report.hpp"
#include "pite/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIdentity = 2;
constexpr int kExitIo = 3;
constexpr const char* kVersion = "0.1.0";
constexpr const char* kOutputDirEnv = "PITEBENCH_OUT";

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T>
void read_field(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

pite::harness::RunConfig parse_config(const json& j) {
    static const std::set<std::string> known = {
        "modes",       "grid",        "mu_delta", "rho",        "p",
        "n",           "learners",    "replications", "master_seed", "workers",
        "cv_folds",    "output_dir",  "dump_pairs", "dump_populations",
        "rf_trees",    "gbm_rounds"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ValidationError("config: unknown field '" + key + "'");

    pite::harness::RunConfig cfg;

    if (j.contains("modes")) {
        cfg.modes.clear();
        for (const auto& m : j.at("modes")) {
            const auto mode = pite::simgen::parse_mode(m.get<std::string>());
            if (!mode) throw ValidationError("config: unknown mode '" + m.get<std::string>() + "'");
            cfg.modes.push_back(*mode);
        }
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.is_string()) {
            if (g.get<std::string>() != "full")
                throw ValidationError("config: grid must be \"full\" or an axes object");
            cfg.full_grid = true;
        } else if (g.is_object()) {
            cfg.full_grid = false;
            if (g.contains("mu_delta")) cfg.mu_values = g.at("mu_delta").get<std::vector<double>>();
            if (g.contains("rho")) cfg.rho_values = g.at("rho").get<std::vector<double>>();
            if (g.contains("p")) cfg.p_values = g.at("p").get<std::vector<int>>();
            if (g.contains("n")) cfg.n_values = g.at("n").get<std::vector<int>>();
            for (const auto& [key, value] : g.items())
                if (key != "mu_delta" && key != "rho" && key != "p" && key != "n")
                    throw ValidationError("config: unknown grid axis '" + key + "'");
        } else {
            throw ValidationError("config: grid must be \"full\" or an axes object");
        }
    }
    read_field(j, "learners", cfg.learner_names);
    read_field(j, "replications", cfg.replications);
    read_field(j, "master_seed", cfg.master_seed);
    read_field(j, "workers", cfg.workers);
    read_field(j, "cv_folds", cfg.cv_folds);
    read_field(j, "output_dir", cfg.output_dir);
    read_field(j, "dump_pairs", cfg.dump_pairs);
    read_field(j, "dump_populations", cfg.dump_populations);
    read_field(j, "rf_trees", cfg.rf_trees);
    read_field(j, "gbm_rounds", cfg.gbm_rounds);

    if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg.output_dir = env;

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    return cfg;
}

int cmd_run(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config file " << config_path << "\n";
        return kExitIo;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string raw_config = buffer.str();

    json j;
    try {
        j = json::parse(raw_config);
    } catch (const json::parse_error& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return kExitValidation;
    }

    pite::harness::RunConfig cfg;
    try {
        cfg = parse_config(j);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        const auto scenarios = pite::harness::build_grid(cfg);
        std::cout << "running " << scenarios.size() << " scenario(s) x " << cfg.replications
                  << " replication(s), learners:";
        for (const auto& l : cfg.learner_names) std::cout << ' ' << l;
        std::cout << "\n";

        const auto result = pite::harness::run_all(cfg, cfg.workers);

        fs::create_directories(cfg.output_dir);
        pite::report::write_run_outputs(cfg.output_dir, result);

        // echo the config bytes verbatim and record the run parameters
        {
            std::ofstream echo(cfg.output_dir + "/config_echo.json", std::ios::binary);
            echo << raw_config;
            if (!echo) throw std::runtime_error("cannot write config echo");
        }
        json manifest;
        manifest["tool"] = "pitebench";
        manifest["version"] = kVersion;
        manifest["master_seed"] = cfg.master_seed;
        manifest["replications"] = cfg.replications;
        manifest["scenarios"] = scenarios.size();
        manifest["learners"] = cfg.learner_names;
        {
            std::ofstream mf(cfg.output_dir + "/manifest.json", std::ios::binary);
            mf << manifest.dump(2) << "\n";
            if (!mf) throw std::runtime_error("cannot write manifest");
        }

        int n_err = 0;
        for (const auto& row : result.rows) n_err += row.ok ? 0 : 1;
        std::cout << "wrote " << result.rows.size() << " result rows to " << cfg.output_dir
                  << " (" << n_err << " failures logged)\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_verify(const std::string& inject_bug) {
    pite::verify::Options options;
    if (!inject_bug.empty()) {
        if (inject_bug == "prop1-sign") {
            options.inject_prop1_sign_bug = true;
        } else {
            std::cerr << "error: unknown --inject-bug value '" << inject_bug << "'\n";
            return kExitValidation;
        }
    }
    const auto results = pite::verify::run_identity_suite(options);
    for (const auto& r : results) {
        std::printf("%-22s gap=%-12.4g tolerance=%-12.4g %s  (%s)\n", r.name.c_str(), r.gap,
                    r.tolerance, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    }
    if (!pite::verify::all_pass(results)) {
        for (const auto& r : results)
            if (!r.pass) std::cerr << "identity violated: " << r.name << "\n";
        return kExitIdentity;
    }
    return kExitOk;
}

int cmd_report(const std::string& results_dir) {
    if (!fs::exists(results_dir + "/results.csv")) {
        std::cerr << "error: no results.csv under " << results_dir << "\n";
        return kExitIo;
    }
    try {
        pite::report::write_report(results_dir);
        std::cout << "report written to " << results_dir << "/report\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PITE simulation benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "execute a simulation grid from a config file");
    run->add_option("-c,--config", config_path, "JSON config file")->required();

    std::string inject_bug;
    auto* verify = app.add_subcommand("verify", "run the metric-identity suite");
    verify->add_option("--inject-bug", inject_bug,
                       "test hook; 'prop1-sign' flips the bias cross term");

    std::string results_dir;
    auto* report = app.add_subcommand("report", "derive tables from a finished run");
    report->add_option("-r,--results", results_dir, "results directory from `run`")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path);
    if (verify->parsed()) return cmd_verify(inject_bug);
    if (report->parsed()) return cmd_report(results_dir);
    return kExitValidation;
}
