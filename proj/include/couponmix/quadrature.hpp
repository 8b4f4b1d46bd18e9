#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "couponmix/errors.hpp"

namespace couponmix {

struct QuadratureSettings {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights (positive half; node 7 is the center).
inline constexpr double kGkNode[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Weights of the embedded 7-point Gauss rule (nodes 1, 3, 5, 7 above).
inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment gk15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    const double fc = f(center);
    double resk = kKronrodW[7] * fc;
    double resg = kGaussW[3] * fc;
    double resabs = std::fabs(resk);
    fv[14] = fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGkNode[i];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv[2 * i] = f1;
        fv[2 * i + 1] = f2;
        resk += kKronrodW[i] * (f1 + f2);
        if (i % 2 == 1) resg += kGaussW[i / 2] * (f1 + f2);
        resabs += kKronrodW[i] * (std::fabs(f1) + std::fabs(f2));
    }
    const double mean = resk * 0.5;
    double resasc = kKronrodW[7] * std::fabs(fc - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kKronrodW[i] * (std::fabs(fv[2 * i] - mean) + std::fabs(fv[2 * i + 1] - mean));
    resasc *= std::fabs(half);
    resabs *= std::fabs(half);

    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double tiny = 50.0 * 2.2250738585072014e-308;
    if (resabs > tiny) err = std::max(err, 2.220446049250313e-16 * 50.0 * resabs);

    return Segment{a, b, resk * half, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration on [a, b]. `breaks` seeds the
// initial segmentation (useful when the integrand has a known transition
// region far from the endpoints). Throws NumericalError when the error goal
// is not met within max_subdivisions.
template <typename F>
QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                    const QuadratureSettings& s = {},
                                    const std::vector<double>& breaks = {}) {
    if (!(a < b)) return {0.0, 0.0, 0};

    std::priority_queue<detail::Segment> queue;
    double total = 0.0, total_err = 0.0;
    auto push = [&](detail::Segment seg) {
        if (!std::isfinite(seg.value))
            throw NumericalError("quadrature: non-finite integrand value");
        total += seg.value;
        total_err += seg.error;
        queue.push(seg);
    };

    double left = a;
    for (double cut : breaks) {
        if (cut <= left || cut >= b) continue;
        push(detail::gk15(f, left, cut));
        left = cut;
    }
    push(detail::gk15(f, left, b));

    int splits = 0;
    while (total_err > std::max(s.abs_tol, s.rel_tol * std::fabs(total))) {
        if (splits >= s.max_subdivisions)
            throw NumericalError("quadrature did not converge within " +
                                 std::to_string(s.max_subdivisions) + " subdivisions");
        detail::Segment worst = queue.top();
        queue.pop();
        total -= worst.value;
        total_err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw NumericalError("quadrature interval underflow near x = " +
                                 std::to_string(worst.a));
        push(detail::gk15(f, worst.a, mid));
        push(detail::gk15(f, mid, worst.b));
        ++splits;
    }

    return {total, total_err, splits};
}

}  // namespace couponmix
