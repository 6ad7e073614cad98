#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "circumnav/errors.hpp"
#include "circumnav/geometry.hpp"

namespace circumnav {

// One sliding-window excitation statistic. For a scalar signal the measure is
// the integral of f^2; for a planar signal it is the minimum eigenvalue of the
// 2x2 windowed outer-product integral.
struct PEWindowStat {
    double t_start = 0.0;
    double t_end = 0.0;
    double measure = 0.0;
};

struct PEResult {
    std::vector<PEWindowStat> windows;
    bool verdict = false;  // true iff every window exceeds the threshold
    double min_measure = 0.0;
};

namespace detail {

inline double lambda_min_2x2(double a, double b, double d) {
    // symmetric [[a, b], [b, d]]
    const double tr = a + d;
    const double disc = std::sqrt(std::max(0.0, (a - d) * (a - d) + 4.0 * b * b));
    return 0.5 * (tr - disc);
}

inline PEResult pe_windows(std::size_t count, double dt, double window, double epsilon,
                           std::size_t stride,
                           const std::vector<double>& ca, const std::vector<double>& cb,
                           const std::vector<double>& cd, bool vector_signal) {
    const std::size_t wsteps = static_cast<std::size_t>(std::llround(window / dt));
    if (wsteps < 1 || count < wsteps + 1) {
        throw InsufficientData("pe_check: series shorter than the excitation window");
    }
    PEResult res;
    res.verdict = true;
    res.min_measure = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s + wsteps < count; s += stride) {
        const std::size_t e = s + wsteps;
        double measure;
        if (vector_signal) {
            measure = lambda_min_2x2(ca[e] - ca[s], cb[e] - cb[s], cd[e] - cd[s]);
        } else {
            measure = ca[e] - ca[s];
        }
        res.windows.push_back({s * dt, e * dt, measure});
        res.min_measure = std::min(res.min_measure, measure);
        if (measure <= epsilon) res.verdict = false;
    }
    return res;
}

}  // namespace detail

// Definition-style check for a uniformly sampled scalar signal: every window
// of length `window` must satisfy the trapezoidal integral of f^2 > epsilon.
inline PEResult pe_check(const std::vector<double>& f, double dt, double window,
                         double epsilon, std::size_t stride = 1) {
    if (stride == 0) stride = 1;
    const std::size_t n = f.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        cum[i] = cum[i - 1] + 0.5 * dt * (f[i - 1] * f[i - 1] + f[i] * f[i]);
    }
    return detail::pe_windows(n, dt, window, epsilon, stride, cum, cum, cum, false);
}

// Planar-signal variant: lambda_min of the windowed integral of f f^T must
// exceed epsilon on every window. Straight-line motion is rank one and fails.
inline PEResult pe_check(const std::vector<Vec2>& f, double dt, double window,
                         double epsilon, std::size_t stride = 1) {
    if (stride == 0) stride = 1;
    const std::size_t n = f.size();
    std::vector<double> cxx(n, 0.0), cxy(n, 0.0), cyy(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        cxx[i] = cxx[i - 1] + 0.5 * dt * (f[i - 1].x * f[i - 1].x + f[i].x * f[i].x);
        cxy[i] = cxy[i - 1] + 0.5 * dt * (f[i - 1].x * f[i - 1].y + f[i].x * f[i].y);
        cyy[i] = cyy[i - 1] + 0.5 * dt * (f[i - 1].y * f[i - 1].y + f[i].y * f[i].y);
    }
    return detail::pe_windows(n, dt, window, epsilon, stride, cxx, cxy, cyy, true);
}

}  // namespace circumnav
