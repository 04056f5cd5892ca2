#pragma once

#include <cmath>
#include <cstddef>

namespace rtomo {

// 16-point Gauss-Legendre rule on [-1,1].
struct GL16 {
    static constexpr int n = 16;
    static constexpr double x[8] = {
        0.09501250983763744018531934, 0.28160355077925891323046050,
        0.45801677765722738634241944, 0.61787624440264374844667176,
        0.75540440835500303389510119, 0.86563120238783174388046790,
        0.94457502307323257607798842, 0.98940093499164993259615417,
    };
    static constexpr double w[8] = {
        0.18945061045506849628539672, 0.18260341504492358886676366,
        0.16915651939500253818931208, 0.14959598881657673208150173,
        0.12462897125553387205247628, 0.09515851168249278480992510,
        0.06225352393864789286284384, 0.02715245941175409485178057,
    };
};

template <class F>
double gl16(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = h * GL16::x[i];
        acc += GL16::w[i] * (f(c - dx) + f(c + dx));
    }
    return acc * h;
}

// Fixed number of equal GL16 panels.
template <class F>
double gl16_panels(const F& f, double a, double b, int panels) {
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        acc += gl16(f, a + p * h, a + (p + 1) * h);
    return acc;
}

namespace detail {
template <class F>
double adapt_rec(const F& f, double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gl16(f, a, m);
    const double right = gl16(f, m, b);
    const double sum = left + right;
    if (depth <= 0 || std::abs(sum - whole) <= tol)
        return sum;
    return adapt_rec(f, a, m, left, 0.5 * tol, depth - 1) +
           adapt_rec(f, m, b, right, 0.5 * tol, depth - 1);
}
} // namespace detail

// Adaptive bisection; tol is an absolute target for the whole interval.
template <class F>
double gl16_adaptive(const F& f, double a, double b, double tol, int max_depth = 24) {
    if (a == b) return 0.0;
    return detail::adapt_rec(f, a, b, gl16(f, a, b), tol, max_depth);
}

// Integrate over [a,b] with dyadic panel grading toward a singular endpoint
// (mild endpoint singularity in a derivative, e.g. t*log|t|).
template <class F>
double gl16_graded(const F& f, double a, double b, bool singular_at_a, int levels = 12) {
    double acc = 0.0;
    double lo = a, hi = b;
    if (singular_at_a) {
        for (int l = 0; l < levels; ++l) {
            const double m = lo + (hi - lo) * 0.5;
            acc += gl16(f, m, hi);
            hi = m;
        }
        acc += gl16(f, lo, hi);
    } else {
        for (int l = 0; l < levels; ++l) {
            const double m = lo + (hi - lo) * 0.5;
            acc += gl16(f, lo, m);
            lo = m;
        }
        acc += gl16(f, lo, hi);
    }
    return acc;
}

} // namespace rtomo
