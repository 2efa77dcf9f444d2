#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace aoitail::detail {

// Golden-section minimization of a convex (hence unimodal) function on the
// open interval (lo, hi); endpoints are never evaluated, so the objective may
// diverge there.  Returns {argmin, value}.
template <class F>
std::pair<double, double> golden_section(double lo, double hi, F& f, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    double best_s = f1 <= f2 ? x1 : x2;
    double best_v = std::min(f1, f2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        if (f1 < best_v) best_v = f1, best_s = x1;
        if (f2 < best_v) best_v = f2, best_s = x2;
    }
    return {best_s, best_v};
}

// Minimize a convex function on the open interval (lo, hi), where hi may be
// +infinity.  The unbounded case brackets by doubling/halving a probe first;
// if the objective keeps decreasing toward the s -> infinity limit, the
// capped probe (objective already at its numeric limit) is returned.
template <class F>
std::pair<double, double> minimize_convex(double lo, double hi, F f) {
    if (std::isfinite(hi)) {
        return golden_section(lo, hi, f, 1e-8 * (hi - lo));
    }
    double m = 1.0;
    double fm = f(m);
    while (m > 1e-280) {
        const double half = 0.5 * m;
        const double fh = f(half);
        if (!(fh < fm)) break;
        m = half;
        fm = fh;
    }
    while (m < 1e24) {
        const double twice = 2.0 * m;
        const double ft = f(twice);
        if (!(ft < fm)) break;
        m = twice;
        fm = ft;
    }
    if (m >= 1e24) {
        return {m, fm};
    }
    const double a = std::max(lo, 0.25 * m);
    const double b = 4.0 * m;
    return golden_section(a, b, f, 1e-8 * (b - a));
}

}  // namespace aoitail::detail
