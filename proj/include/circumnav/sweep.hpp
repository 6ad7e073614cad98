#pragma once

#include <atomic>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "circumnav/config.hpp"
#include "circumnav/metrics.hpp"
#include "circumnav/output.hpp"
#include "circumnav/sim.hpp"

namespace circumnav {

struct SweepSpec {
    std::string key;             // dotted path into the config document
    std::vector<double> values;
};

// Accepts "key=v1,v2,v3" or "key=start:stop:count" (inclusive linspace).
inline SweepSpec parse_sweep_spec(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError("sweep spec must look like key=v1,v2,... or key=start:stop:count");
    }
    SweepSpec spec;
    spec.key = text.substr(0, eq);
    const std::string rhs = text.substr(eq + 1);
    if (rhs.find(':') != std::string::npos) {
        double start, stop;
        long count;
        char c1, c2;
        std::istringstream in(rhs);
        if (!(in >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1) {
            throw ValidationError("bad range '" + rhs + "', expected start:stop:count");
        }
        for (long i = 0; i < count; ++i) {
            spec.values.push_back(count == 1 ? start
                                             : start + (stop - start) * i / double(count - 1));
        }
    } else {
        std::istringstream in(rhs);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            try {
                spec.values.push_back(std::stod(tok));
            } catch (...) {
                throw ValidationError("bad sweep value '" + tok + "'");
            }
        }
        if (spec.values.empty()) throw ValidationError("sweep value list is empty");
    }
    return spec;
}

namespace sweepdetail {

inline void set_path(nlohmann::json& j, const std::string& dotted, double value) {
    nlohmann::json* cur = &j;
    std::istringstream in(dotted);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(in, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) cur = &((*cur)[parts[i]]);
    // integer-typed keys keep integer JSON type
    if (parts.back() == "seed" || parts.back() == "n_agents" ||
        parts.back() == "broadcast_staleness_steps" || parts.back() == "stride") {
        (*cur)[parts.back()] = static_cast<std::uint64_t>(value);
    } else {
        (*cur)[parts.back()] = value;
    }
}

}  // namespace sweepdetail

struct SweepRunResult {
    double value = 0.0;
    ErrorSummary summary;
    std::filesystem::path out_dir;
    std::string error;  // empty on success
};

// Runs the base config once per sweep value, fanning out across `parallel`
// threads. Each run owns all of its mutable state; results merge in value
// order afterwards.
inline std::vector<SweepRunResult> run_sweep(const SimConfig& base, const SweepSpec& spec,
                                             const std::filesystem::path& out_root,
                                             unsigned parallel) {
    const std::size_t m = spec.values.size();
    std::vector<SweepRunResult> results(m);
    std::atomic<std::size_t> next{0};
    if (parallel == 0) parallel = 1;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= m) return;
            SweepRunResult& res = results[i];
            res.value = spec.values[i];
            std::ostringstream name;
            name << spec.key << '=' << spec.values[i];
            res.out_dir = out_root / name.str();
            try {
                nlohmann::json doc = base.echo;
                sweepdetail::set_path(doc, spec.key, spec.values[i]);
                const SimConfig cfg = parse_config_json(doc);
                const RunRecord record = run(cfg);
                res.summary = summarize(record, cfg.transient_cutoff_fraction * cfg.horizon);
                write_outputs(record, res.summary, res.out_dir, false);
            } catch (const std::exception& e) {
                res.error = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned k = 0; k < parallel; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

inline void write_sweep_summary(const SweepSpec& spec,
                                const std::vector<SweepRunResult>& results,
                                const std::filesystem::path& out_root) {
    auto f = outdetail::open_out(out_root / "sweep_summary.csv");
    f << spec.key
      << ",max_db_overall,max_centre_error,max_radius_error,max_beta_dev_overall,"
         "control_violations,error\n";
    for (const auto& r : results) {
        f << outdetail::fmt(r.value) << ',';
        if (r.error.empty()) {
            f << outdetail::fmt(r.summary.max_db_overall) << ','
              << outdetail::fmt(r.summary.max_centre_error) << ','
              << outdetail::fmt(r.summary.max_radius_error) << ','
              << outdetail::fmt(r.summary.max_beta_dev_overall) << ','
              << r.summary.control_violations << ',';
        } else {
            f << ",,,,,";
        }
        f << '"' << r.error << '"' << "\n";
    }
}

}  // namespace circumnav
