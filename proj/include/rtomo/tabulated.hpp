#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace rtomo {

enum class OutsideRule { Zero, TailPowerLaw };

// Cubic convolution weights (4-point, a = -1/2), exact on linear data.
// u is the fractional position in [0,1) between samples f0 and f1.
inline double cubic4(double fm1, double f0, double f1, double f2, double u) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double wm1 = 0.5 * (-u3 + 2.0 * u2 - u);
    const double w0 = 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0);
    const double w1 = 0.5 * (-3.0 * u3 + 4.0 * u2 + u);
    const double w2 = 0.5 * (u3 - u2);
    return wm1 * fm1 + w0 * f0 + w1 * f1 + w2 * f2;
}

// Uniformly sampled function with cubic interpolation between nodes.
// Evaluation at a tabulated abscissa returns the stored sample exactly.
struct TabulatedFunction {
    double start = 0.0;
    double step = 1.0;
    std::vector<double> samples;
    OutsideRule rule = OutsideRule::Zero;
    double tail_coefficient = 0.0;
    double tail_exponent = 0.0;

    double domain_end() const { return start + step * double(samples.size() - 1); }

    double outside(double t) const {
        if (rule == OutsideRule::TailPowerLaw)
            return tail_coefficient * std::pow(std::abs(t), tail_exponent);
        return 0.0;
    }

    double operator()(double t) const {
        const double u = (t - start) / step;
        if (u < 0.0 || u > double(samples.size() - 1))
            return outside(t);
        const std::ptrdiff_t n = std::ptrdiff_t(samples.size());
        std::ptrdiff_t i = std::ptrdiff_t(std::floor(u));
        if (i >= n - 1) i = n - 2;
        const double frac = u - double(i);
        if (frac == 0.0) return samples[size_t(i)];
        const std::ptrdiff_t im1 = i > 0 ? i - 1 : 0;
        const std::ptrdiff_t ip2 = i + 2 < n ? i + 2 : n - 1;
        return cubic4(samples[size_t(im1)], samples[size_t(i)], samples[size_t(i + 1)],
                      samples[size_t(ip2)], frac);
    }
};

} // namespace rtomo
