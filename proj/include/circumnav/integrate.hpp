#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "circumnav/errors.hpp"

namespace circumnav {

// Scratch buffers for allocation-free stepping inside the simulation loop.
struct Rk4Scratch {
    std::vector<double> k1, k2, k3, k4, tmp;

    void resize(std::size_t n) {
        k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n); tmp.resize(n);
    }
};

// Classical 4th-order Runge-Kutta step for y' = rhs(t, y).
// rhs has signature void(double t, std::span<const double> y, std::span<double> dy).
// The state is advanced in place; throws NonFiniteState if any component
// leaves the finite range.
template <typename Rhs>
void rk4_step(std::vector<double>& y, double t, double dt, Rhs&& rhs, Rk4Scratch& s) {
    const std::size_t n = y.size();
    s.resize(n);

    rhs(t, std::span<const double>(y), std::span<double>(s.k1));
    for (std::size_t i = 0; i < n; ++i) s.tmp[i] = y[i] + 0.5 * dt * s.k1[i];
    rhs(t + 0.5 * dt, std::span<const double>(s.tmp), std::span<double>(s.k2));
    for (std::size_t i = 0; i < n; ++i) s.tmp[i] = y[i] + 0.5 * dt * s.k2[i];
    rhs(t + 0.5 * dt, std::span<const double>(s.tmp), std::span<double>(s.k3));
    for (std::size_t i = 0; i < n; ++i) s.tmp[i] = y[i] + dt * s.k3[i];
    rhs(t + dt, std::span<const double>(s.tmp), std::span<double>(s.k4));

    for (std::size_t i = 0; i < n; ++i) {
        y[i] += dt / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
        if (!std::isfinite(y[i])) {
            throw NonFiniteState("rk4_step: non-finite state component " +
                                 std::to_string(i) + " at t=" + std::to_string(t));
        }
    }
}

template <typename Rhs>
void rk4_step(std::vector<double>& y, double t, double dt, Rhs&& rhs) {
    Rk4Scratch s;
    rk4_step(y, t, dt, std::forward<Rhs>(rhs), s);
}

}  // namespace circumnav
