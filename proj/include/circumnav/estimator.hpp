#pragma once

#include <algorithm>
#include <cmath>

#include "circumnav/geometry.hpp"
#include "circumnav/integrate.hpp"

namespace circumnav {

// State-variable filter bank of agent 1. The algebraic filter outputs
// (eta, m, V, m2, V2) are the state derivatives themselves, so no measured
// signal is ever differentiated.
struct FilterBank {
    double z1 = 0.0;  // input (D^b_1)^2 / 2
    double z2 = 0.0;  // input (D^c_1)^2 / 2
    double z3 = 0.0;  // input D^c_1
    double z4 = 0.0;  // input ||p1||^2 / 2
    Vec2 z5;          // input p1
    double alpha = 0.5;  // filter pole, > 0
};

// Agent 1's distance measurements plus its own position.
struct Measurement {
    double dc = 0.0;  // D^c_1
    double db = 0.0;  // D^b_1
    Vec2 p1;
};

struct FilterOutputs {
    double dz1, dz2, dz3, dz4;
    Vec2 dz5;
    double eta;    // = dz1
    double m;      // = dz2, reused as eta2 for the centre estimator
    double v;      // = dz3, bounded estimate of dD^c_1/dt
    double m2;     // = dz4
    Vec2 v2;       // = dz5, bounded estimate of dp1/dt
};

inline FilterOutputs filter_rhs(const FilterBank& f, const Measurement& m) {
    FilterOutputs o{};
    o.dz1 = -f.alpha * f.z1 + 0.5 * m.db * m.db;
    o.dz2 = -f.alpha * f.z2 + 0.5 * m.dc * m.dc;
    o.dz3 = -f.alpha * f.z3 + m.dc;
    o.dz4 = -f.alpha * f.z4 + 0.5 * m.p1.norm_sq();
    o.dz5 = -f.alpha * f.z5 + m.p1;
    o.eta = o.dz1;
    o.m = o.dz2;
    o.v = o.dz3;
    o.m2 = o.dz4;
    o.v2 = o.dz5;
    return o;
}

// Radius adaptation law.
inline double radius_estimator_rhs(double v, double eta, double m, double r_hat,
                                   double gamma) {
    return -gamma * v * (eta - m + v * r_hat);
}

// Centre adaptation law; eta2 is the same signal as m (both are dz2).
inline Vec2 center_estimator_rhs(Vec2 v2, double eta2, double m2, Vec2 c_hat,
                                 double gamma) {
    return -gamma * (eta2 - m2 + v2.dot(c_hat)) * v2;
}

struct EstimatorState {
    FilterBank filters;
    double r_hat = 1.0;
    Vec2 c_hat;
    double gamma = 0.06;   // adaptation gain, > 0
    double r_floor = 0.1;  // numerical safety clip on r_hat
};

struct EstimatorStepResult {
    EstimatorState state;
    double r_hat_dot = 0.0;  // instantaneous rates at the post-step state,
    Vec2 c_hat_dot;          // feed-forward terms for the control law
    bool r_hat_clipped = false;
};

namespace detail {

inline void pack_estimator(const EstimatorState& e, std::vector<double>& y) {
    y = {e.filters.z1, e.filters.z2, e.filters.z3, e.filters.z4,
         e.filters.z5.x, e.filters.z5.y, e.r_hat, e.c_hat.x, e.c_hat.y};
}

inline void unpack_estimator(std::span<const double> y, EstimatorState& e) {
    e.filters.z1 = y[0];
    e.filters.z2 = y[1];
    e.filters.z3 = y[2];
    e.filters.z4 = y[3];
    e.filters.z5 = {y[4], y[5]};
    e.r_hat = y[6];
    e.c_hat = {y[7], y[8]};
}

}  // namespace detail

// Advances filters and estimates one step with the measurement held constant
// (zero-order hold), using the shared RK4 integrator. The full simulation
// integrates the same right-hand sides jointly with the agent dynamics; this
// standalone step serves estimator-only use and tests.
inline EstimatorStepResult estimator_step(const EstimatorState& e, const Measurement& m,
                                          double dt) {
    EstimatorState cur = e;
    std::vector<double> y;
    detail::pack_estimator(cur, y);

    auto rhs = [&](double, std::span<const double> s, std::span<double> dy) {
        EstimatorState tmp = cur;  // carries alpha/gamma
        detail::unpack_estimator(s, tmp);
        const FilterOutputs f = filter_rhs(tmp.filters, m);
        const double drhat = radius_estimator_rhs(f.v, f.eta, f.m, tmp.r_hat, tmp.gamma);
        const Vec2 dchat = center_estimator_rhs(f.v2, f.m, f.m2, tmp.c_hat, tmp.gamma);
        dy[0] = f.dz1; dy[1] = f.dz2; dy[2] = f.dz3; dy[3] = f.dz4;
        dy[4] = f.dz5.x; dy[5] = f.dz5.y;
        dy[6] = drhat; dy[7] = dchat.x; dy[8] = dchat.y;
    };
    rk4_step(y, 0.0, dt, rhs);

    EstimatorStepResult out;
    out.state = cur;
    detail::unpack_estimator(y, out.state);
    if (out.state.r_hat < out.state.r_floor) {
        out.state.r_hat = out.state.r_floor;
        out.r_hat_clipped = true;
    }
    const FilterOutputs f = filter_rhs(out.state.filters, m);
    out.r_hat_dot = radius_estimator_rhs(f.v, f.eta, f.m, out.state.r_hat, out.state.gamma);
    out.c_hat_dot = center_estimator_rhs(f.v2, f.m, f.m2, out.state.c_hat, out.state.gamma);
    return out;
}

}  // namespace circumnav
