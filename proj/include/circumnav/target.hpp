#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "circumnav/errors.hpp"
#include "circumnav/geometry.hpp"
#include "circumnav/random.hpp"

namespace circumnav {

// Ground-truth moving circle. Hidden from all agents except through agent 1's
// distance measurements.
struct TargetState {
    Vec2 c;              // centre
    double r = 1.0;      // radius, > 0
    Vec2 c_dot;          // current centre velocity (held over a step)
    double r_dot = 0.0;  // current radius rate
};

enum class ScriptKind { stationary, paper_random_walk, circular_path, piecewise };

struct Waypoint {
    double t = 0.0;
    Vec2 c;
    double r = 1.0;
};

struct TargetScript {
    ScriptKind kind = ScriptKind::stationary;

    // paper_random_walk: velocity = (drift + noise_scale*N(0,1)) per component,
    // radius rate = noise_scale_r*N(0,1), redrawn each step and held.
    Vec2 drift{0.5, 0.5};
    double noise_scale = 1.0;
    double noise_scale_r = 1.0;

    // circular_path: centre moves ccw around path_center at angular_rate.
    Vec2 path_center;
    double angular_rate = 0.0;

    std::vector<Waypoint> waypoints;  // piecewise, sorted by t

    // Problem bounds and the radius floor, enforced on every realized velocity.
    double max_centre_speed = 2.0;  // eps1
    double max_radius_rate = 1.5;   // eps2
    double r_min = 0.5;
};

struct TargetStepEvents {
    bool centre_clipped = false;
    bool radius_clipped = false;
    bool radius_floored = false;
};

namespace detail {

inline Vec2 clip_norm(Vec2 v, double cap, bool& clipped) {
    const double n = v.norm();
    if (n > cap && n > 0.0) {
        clipped = true;
        return v * (cap / n);
    }
    return v;
}

inline double clip_abs(double x, double cap, bool& clipped) {
    if (std::abs(x) > cap) {
        clipped = true;
        return std::copysign(cap, x);
    }
    return x;
}

}  // namespace detail

// Draws the velocity for the step starting at time t and advances the state by
// dt (zero-order hold: the velocity is constant within the step). Velocities
// are clipped to the eps1/eps2 caps and the radius floored at r_min; these are
// silent but reported through events for the run log.
inline TargetState step_target(const TargetState& s, const TargetScript& script,
                               double t, double dt, SeededRng& rng,
                               TargetStepEvents* events = nullptr) {
    TargetStepEvents ev;
    TargetState out = s;

    switch (script.kind) {
        case ScriptKind::stationary:
            out.c_dot = {0.0, 0.0};
            out.r_dot = 0.0;
            break;
        case ScriptKind::paper_random_walk: {
            const double a1 = rng.normal();
            const double a2 = rng.normal();
            const double a3 = rng.normal();
            out.c_dot = {script.drift.x + script.noise_scale * a1,
                         script.drift.y + script.noise_scale * a2};
            out.r_dot = script.noise_scale_r * a3;
            break;
        }
        case ScriptKind::circular_path: {
            // velocity is the ccw tangent of the current radius vector, so the
            // exact flow stays on the circle around path_center
            const Vec2 radial = s.c - script.path_center;
            out.c_dot = script.angular_rate * Vec2{-radial.y, radial.x};
            out.r_dot = 0.0;
            break;
        }
        case ScriptKind::piecewise: {
            out.c_dot = {0.0, 0.0};
            out.r_dot = 0.0;
            const auto& wp = script.waypoints;
            for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
                if (t >= wp[i].t && t < wp[i + 1].t) {
                    const double span = wp[i + 1].t - wp[i].t;
                    out.c_dot = (wp[i + 1].c - wp[i].c) / span;
                    out.r_dot = (wp[i + 1].r - wp[i].r) / span;
                    break;
                }
            }
            break;
        }
    }

    out.c_dot = detail::clip_norm(out.c_dot, script.max_centre_speed, ev.centre_clipped);
    out.r_dot = detail::clip_abs(out.r_dot, script.max_radius_rate, ev.radius_clipped);

    out.c = s.c + out.c_dot * dt;
    out.r = s.r + out.r_dot * dt;
    if (out.r < script.r_min) {
        out.r = script.r_min;
        ev.radius_floored = true;
    }
    if (events) *events = ev;
    return out;
}

// One-shot noisy initialization of the estimates, nominally from a satellite.
struct SatelliteEstimate {
    Vec2 c_hat0;
    double r_hat0 = 1.0;
};

inline SatelliteEstimate satellite_observe(const TargetState& s, double noise_c,
                                           double noise_r, SeededRng& rng,
                                           double r_floor = 0.1) {
    SatelliteEstimate e;
    e.c_hat0 = {s.c.x + rng.normal(0.0, noise_c), s.c.y + rng.normal(0.0, noise_c)};
    e.r_hat0 = std::max(s.r + rng.normal(0.0, noise_r), r_floor);
    return e;
}

// Paper-mode observation: centre exact, radius overestimated by a factor of
// two, matching the reference scenario's initialization.
inline SatelliteEstimate satellite_observe_paper(const TargetState& s) {
    return {s.c, 2.0 * s.r};
}

}  // namespace circumnav
