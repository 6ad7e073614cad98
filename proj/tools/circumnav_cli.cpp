// Command-line front end: run a scenario, sweep a parameter, verify the
// acceptance suite, or evaluate persistent excitation on a recorded trajectory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "circumnav/acceptance.hpp"
#include "circumnav/config.hpp"
#include "circumnav/metrics.hpp"
#include "circumnav/output.hpp"
#include "circumnav/pe.hpp"
#include "circumnav/sim.hpp"
#include "circumnav/sweep.hpp"

namespace fs = std::filesystem;
using namespace circumnav;

namespace {

fs::path default_out_dir() {
    if (const char* env = std::getenv("CIRCUMNAV_OUT_DIR")) return env;
    return "out";
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool plot,
            bool strict_flag, bool permissive_flag) {
    SimConfig cfg = load_config(config_path);
    if (strict_flag) cfg.strict = true;
    if (permissive_flag) cfg.strict = false;
    const RunRecord record = run(cfg);
    const ErrorSummary summary =
        summarize(record, cfg.transient_cutoff_fraction * cfg.horizon);
    const OutputBundle bundle = write_outputs(record, summary, out_dir, plot);
    std::cout << "wrote " << bundle.trajectory_csv.string() << " and "
              << bundle.summary_json_path.string() << "\n";
    std::cout << "max Db (post-cutoff): " << summary.max_db_overall
              << "  max centre err: " << summary.max_centre_error
              << "  max radius err: " << summary.max_radius_error
              << "  max beta dev: " << summary.max_beta_dev_overall << "\n";
    if (!record.invariants_ok) {
        std::cout << "invariant violations were logged (permissive mode); see summary.json\n";
        return static_cast<int>(ErrorCategory::invariant);
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& vary,
              const std::string& out_dir, unsigned parallel) {
    const SimConfig base = load_config(config_path);
    const SweepSpec spec = parse_sweep_spec(vary);
    const auto results = run_sweep(base, spec, out_dir, parallel);
    write_sweep_summary(spec, results, out_dir);
    std::size_t failed = 0;
    for (const auto& r : results) {
        std::cout << spec.key << " = " << r.value << ": ";
        if (r.error.empty()) {
            std::cout << "max Db " << r.summary.max_db_overall << ", centre err "
                      << r.summary.max_centre_error << "\n";
        } else {
            std::cout << "error: " << r.error << "\n";
            ++failed;
        }
    }
    std::cout << "sweep summary: " << (fs::path(out_dir) / "sweep_summary.csv").string() << "\n";
    return failed == 0 ? 0 : static_cast<int>(ErrorCategory::generic);
}

int cmd_verify(const std::string& configs_dir, const std::string& scratch_dir) {
    const auto results = acceptance::run_all(configs_dir, scratch_dir);
    return acceptance::print_results(results, std::cout);
}

// Reads one or two columns of a trajectory CSV back in for the excitation
// check. The defaults target the applied control of the sensing agent,
// which equals its velocity under the single-integrator dynamics.
int cmd_pe_check(const std::string& record_path, const std::string& signal, double window,
                 double threshold, std::size_t stride) {
    std::ifstream in(record_path);
    if (!in) throw IoError("cannot open record: " + record_path);
    std::string header;
    if (!std::getline(in, header)) throw InsufficientData("empty record file");
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        std::string tok;
        while (std::getline(hs, tok, ',')) cols.push_back(tok);
    }
    auto col_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (cols[i] == name) return i;
        }
        throw SchemaError("column '" + name + "' not found in record");
    };

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw InsufficientData("record has fewer than two rows");
    const double dt = rows[1][col_index("t")] - rows[0][col_index("t")];

    PEResult res;
    if (signal == "pdot1") {
        const std::size_t ix = col_index("U1_x");
        const std::size_t iy = col_index("U1_y");
        std::vector<Vec2> f;
        f.reserve(rows.size());
        for (const auto& row : rows) f.push_back({row[ix], row[iy]});
        res = pe_check(f, dt, window, threshold, stride);
    } else if (signal == "dcdot1") {
        const std::size_t ic = col_index("Dc1");
        std::vector<double> f(rows.size(), 0.0);
        for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
            f[i] = (rows[i + 1][ic] - rows[i - 1][ic]) / (2.0 * dt);
        }
        f[0] = (rows[1][ic] - rows[0][ic]) / dt;
        f.back() = (rows[rows.size() - 1][ic] - rows[rows.size() - 2][ic]) / dt;
        res = pe_check(f, dt, window, threshold, stride);
    } else {
        throw SchemaError("--signal must be pdot1 or dcdot1");
    }

    std::cout << "windows evaluated: " << res.windows.size() << "\n";
    std::cout << "min excitation measure: " << res.min_measure << " (threshold " << threshold
              << ", T = " << window << ")\n";
    std::cout << "verdict: " << (res.verdict ? "persistently exciting" : "NOT persistently exciting")
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic multi-agent target circumnavigation simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = default_out_dir().string();
    bool plot = false, strict_flag = false, permissive_flag = false;
    auto* run_cmd = app.add_subcommand("run", "run one scenario and write outputs");
    run_cmd->add_option("--config", config_path, "scenario config JSON")->required();
    run_cmd->add_option("--out", out_dir, "output directory (env CIRCUMNAV_OUT_DIR)");
    run_cmd->add_flag("--plot", plot, "also emit SVG plots");
    run_cmd->add_flag("--strict", strict_flag, "abort on invariant violation");
    run_cmd->add_flag("--permissive", permissive_flag, "log invariant violations and continue");

    std::string vary;
    unsigned parallel = 1;
    std::string sweep_out = (default_out_dir() / "sweep").string();
    auto* sweep_cmd = app.add_subcommand("sweep", "run a config across a parameter range");
    sweep_cmd->add_option("--config", config_path, "base scenario config JSON")->required();
    sweep_cmd->add_option("--vary", vary, "key=v1,v2,... or key=start:stop:count")->required();
    sweep_cmd->add_option("--parallel", parallel, "worker threads");
    sweep_cmd->add_option("--out", sweep_out, "output root directory");

    std::string configs_dir = "configs";
    std::string scratch_dir;
    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
    verify_cmd->add_option("--configs", configs_dir, "directory with the shipped presets");
    verify_cmd->add_option("--scratch", scratch_dir, "scratch directory for verification files");

    std::string record_path, signal = "pdot1";
    double window = 20.0, threshold = 0.1;
    std::size_t stride = 100;
    auto* pe_cmd = app.add_subcommand("pe-check", "excitation check on a recorded trajectory");
    pe_cmd->add_option("--record", record_path, "trajectory CSV")->required();
    pe_cmd->add_option("--signal", signal, "pdot1 (default) or dcdot1");
    pe_cmd->add_option("--window", window, "excitation period T");
    pe_cmd->add_option("--threshold", threshold, "excitation level epsilon");
    pe_cmd->add_option("--stride", stride, "window-start stride in samples");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, out_dir, plot, strict_flag, permissive_flag);
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, vary, sweep_out, parallel);
        if (verify_cmd->parsed()) {
            if (scratch_dir.empty()) scratch_dir = (default_out_dir() / "verify-scratch").string();
            return cmd_verify(configs_dir, scratch_dir);
        }
        if (pe_cmd->parsed()) return cmd_pe_check(record_path, signal, window, threshold, stride);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorCategory::generic);
    }
    return 0;
}
