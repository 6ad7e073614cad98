#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "circumnav/errors.hpp"
#include "circumnav/pe.hpp"
#include "circumnav/sim.hpp"

namespace circumnav {

// Steady-state error maxima, computed over t >= transient cutoff only (the
// limsup structure of the problem bounds is why the cutoff exists).
struct ErrorSummary {
    double transient_cutoff = 0.0;
    std::vector<double> max_db;        // per ring position
    double max_db_overall = 0.0;
    double max_centre_error = 0.0;     // ||c_hat - c||
    double max_radius_error = 0.0;     // |r_hat - r|
    std::vector<double> max_beta_dev;  // per ring position, vs 2pi/n
    double max_beta_dev_overall = 0.0;
    std::size_t control_violations = 0;  // applied components beyond u_max
    double min_beta = 0.0;
    double min_r_hat = 0.0;
};

inline ErrorSummary summarize(const RunRecord& record, double transient_cutoff) {
    if (record.steps.empty()) throw EmptyWindow("summarize: empty record");
    const double t_end = record.steps.back().t;
    if (!(transient_cutoff < t_end)) {
        throw EmptyWindow("summarize: cutoff leaves no samples");
    }
    const std::size_t n = record.config.n_agents;
    const double beta_ref = two_pi / static_cast<double>(n);
    const double u_max = record.config.controller.u_max;
    const bool saturating = record.config.controller.mode == ActuationMode::saturate;

    ErrorSummary s;
    s.transient_cutoff = transient_cutoff;
    s.max_db.assign(n, 0.0);
    s.max_beta_dev.assign(n, 0.0);
    s.min_beta = std::numeric_limits<double>::infinity();
    s.min_r_hat = std::numeric_limits<double>::infinity();

    for (const StepRow& row : record.steps) {
        if (row.t < transient_cutoff) continue;
        for (std::size_t k = 0; k < n; ++k) {
            s.max_db[k] = std::max(s.max_db[k], row.db[k]);
            const double dev = std::abs(row.beta[k] - beta_ref);
            s.max_beta_dev[k] = std::max(s.max_beta_dev[k], dev);
            s.min_beta = std::min(s.min_beta, row.beta[k]);
            if (saturating) {
                if (std::abs(row.u_applied[k].x) > u_max * (1.0 + 1e-12) ||
                    std::abs(row.u_applied[k].y) > u_max * (1.0 + 1e-12)) {
                    ++s.control_violations;
                }
            }
        }
        s.max_centre_error = std::max(s.max_centre_error, (row.c_hat - row.c).norm());
        s.max_radius_error = std::max(s.max_radius_error, std::abs(row.r_hat - row.r));
        s.min_r_hat = std::min(s.min_r_hat, row.r_hat);
    }
    s.max_db_overall = *std::max_element(s.max_db.begin(), s.max_db.end());
    s.max_beta_dev_overall = *std::max_element(s.max_beta_dev.begin(), s.max_beta_dev.end());
    return s;
}

// Max deviation of a logged series from the exponential decay w(0)e^{-delta t}.
inline double decay_fit(const std::vector<double>& t, const std::vector<double>& w,
                        double delta) {
    double err = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        err = std::max(err, std::abs(w[i] - w[0] * std::exp(-delta * (t[i] - t[0]))));
    }
    return err;
}

// Signals for the runtime excitation check. pdot1 is the applied control of
// the sensing agent (equal to its velocity under the integrator dynamics);
// dcdot1 is reconstructed by central differencing of the logged D^c_1 series.
// The reconstruction is diagnostic only and never feeds the estimator.
struct PESignals {
    std::vector<Vec2> pdot1;
    std::vector<double> dcdot1;
};

inline PESignals pe_signals(const RunRecord& record) {
    PESignals s;
    const auto& steps = record.steps;
    s.pdot1.reserve(steps.size());
    for (const StepRow& row : steps) s.pdot1.push_back(row.u_applied[0]);
    s.dcdot1.resize(steps.size(), 0.0);
    const double dt = record.dt();
    for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
        if (i == 0) {
            s.dcdot1[i] = (steps[1].dc[0] - steps[0].dc[0]) / dt;
        } else {
            s.dcdot1[i] = (steps[i + 1].dc[0] - steps[i - 1].dc[0]) / (2.0 * dt);
        }
    }
    if (steps.size() >= 2) {
        const std::size_t m = steps.size() - 1;
        s.dcdot1[m] = (steps[m].dc[0] - steps[m - 1].dc[0]) / dt;
    }
    return s;
}

}  // namespace circumnav
