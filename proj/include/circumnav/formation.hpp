#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "circumnav/errors.hpp"
#include "circumnav/geometry.hpp"

namespace circumnav {

// Assignment of agents to ring positions. perm[k] is the agent id in position
// k+1; the sensing agent is always in position 1. Computed once at t=0 and
// only verified afterwards, so an order-preservation violation is detected
// rather than silently repaired.
struct RingOrder {
    std::vector<std::size_t> perm;
    std::size_t sensing = 0;

    std::size_t size() const { return perm.size(); }
    std::size_t agent_at(std::size_t position) const { return perm[position]; }
};

// Inter-agent angles about the estimated centre, beta[i] from ring position
// i+1 to its ccw successor. Each is in [0, 2pi); the sum is 2pi for a validly
// ordered ring (winding number one).
struct BetaVector {
    std::vector<double> beta;

    std::size_t size() const { return beta.size(); }
    double sum() const { return std::accumulate(beta.begin(), beta.end(), 0.0); }
};

// Signed incidence matrix of the ccw directed ring 1 -> 2 -> ... -> n -> 1.
// B[i][j] is +1 if edge j leaves vertex i, -1 if it enters it.
struct RingIncidence {
    std::size_t n = 0;
    std::vector<std::vector<int>> b;
};

inline RingIncidence ring_incidence(std::size_t n) {
    RingIncidence inc;
    inc.n = n;
    inc.b.assign(n, std::vector<int>(n, 0));
    for (std::size_t j = 0; j < n; ++j) {
        inc.b[j][j] = 1;                // edge j originates at vertex j
        inc.b[(j + 1) % n][j] = -1;     // and points to vertex j+1
    }
    return inc;
}

// Orders agents into ring positions: sensing agent first, the rest by
// increasing ccw angle from it about c_hat. Exact angle ties break by agent id.
inline RingOrder order_agents(const std::vector<Vec2>& positions, Vec2 c_hat,
                              std::size_t sensing_index) {
    const std::size_t n = positions.size();
    const Vec2 ref = positions[sensing_index] - c_hat;
    if (ref.norm() < eps_min) {
        throw SingularBearing("order_agents: sensing agent at estimated centre");
    }

    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == sensing_index) continue;
        keyed.emplace_back(ccw_angle(ref, positions[i] - c_hat).radians(), i);
    }
    std::sort(keyed.begin(), keyed.end());

    RingOrder order;
    order.sensing = sensing_index;
    order.perm.reserve(n);
    order.perm.push_back(sensing_index);
    for (const auto& [angle, id] : keyed) order.perm.push_back(id);
    return order;
}

// beta_i = ccw angle from position i to position i+1 (wrapping), about c_hat.
inline BetaVector compute_betas(const RingOrder& order, const std::vector<Vec2>& positions,
                                Vec2 c_hat) {
    const std::size_t n = order.size();
    BetaVector out;
    out.beta.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 vi = positions[order.agent_at(k)] - c_hat;
        const Vec2 vnext = positions[order.agent_at((k + 1) % n)] - c_hat;
        out.beta[k] = ccw_angle(vi, vnext).radians();
    }
    return out;
}

// Closed-form reference dynamics beta' = -delta * B^T beta for the ring:
// beta_i' = delta * (beta_{i+1} - beta_i), wrapping at n. The full control
// loop must reproduce this; it serves as the verification oracle.
inline std::vector<double> beta_reference_rhs(const BetaVector& beta, double delta) {
    const std::size_t n = beta.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = delta * (beta.beta[(i + 1) % n] - beta.beta[i]);
    }
    return d;
}

}  // namespace circumnav
