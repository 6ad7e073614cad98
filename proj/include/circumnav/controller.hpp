#pragma once

#include <cmath>

#include "circumnav/geometry.hpp"

namespace circumnav {

enum class ActuationMode { scale, saturate };

struct ControllerParams {
    ActuationMode mode = ActuationMode::saturate;
    double delta = 1.0;   // scale mode gain, > 0
    double u_max = 1.5;   // saturate mode speed cap, > 0
};

struct ControlCommand {
    Vec2 u;  // raw law output
    Vec2 U;  // applied, after scaling or saturation
};

// The three-term law: feed-forward centre rate, radial regulation toward the
// estimated boundary, and ccw tangential motion weighted by the angle to the
// next agent.
inline Vec2 control_law(Vec2 c_hat_dot, double r_hat_dot, double dc_hat,
                        double r_hat, double beta_i, Vec2 psi_i) {
    const double radial = (dc_hat - r_hat) - r_hat_dot;
    return c_hat_dot + radial * psi_i + beta_i * dc_hat * rot90(psi_i);
}

// Scale mode: U = delta*u. Saturate mode: norm-capped at u_max with direction
// preserved.
inline Vec2 apply_actuation(Vec2 u, const ControllerParams& p) {
    if (p.mode == ActuationMode::scale) return p.delta * u;
    const double n = u.norm();
    if (n <= p.u_max) return u;
    return u * (p.u_max / n);
}

}  // namespace circumnav
