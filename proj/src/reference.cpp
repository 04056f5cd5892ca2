#include "rtomo/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace rtomo {

double line_integral_dense(double alpha, double s, const PhantomSpec& ph, double fine_step) {
    if (!(fine_step > 0.0) || fine_step > ph.eps / 8.0)
        throw std::invalid_argument("line_integral_dense: fine_step must be in (0, eps/8]");
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double salong = ca * ph.center.x + sa * ph.center.y;
    const double tc = -sa * ph.center.x + ca * ph.center.y;
    const double d = std::abs(s - salong);
    const double m = phantom_sup_h0(ph) + 1.0;
    const double r_out = ph.radius + m * ph.eps;
    if (d >= r_out) return 0.0;

    double chord = 0.0;
    if (ph.mode == PhantomMode::Full && d < ph.radius)
        chord = 2.0 * std::sqrt(ph.radius * ph.radius - d * d);

    const double hi = std::sqrt(r_out * r_out - d * d);
    const ShellClassifier cls(ph);
    const double a = tc - (hi + 4.0 * fine_step);
    const double b = tc + (hi + 4.0 * fine_step);
    long sum = 0;
    for (long i = long(std::ceil(a / fine_step - 0.5));; ++i) {
        const double t = (double(i) + 0.5) * fine_step;
        if (t >= b) break;
        sum += cls.sign({s * ca - t * sa, s * sa + t * ca});
    }
    return (ph.f_in - ph.f_out) * (chord + double(sum) * fine_step);
}

Sinogram simulate_sinogram_serial(const PhantomSpec& ph, const ScanGeometry& geom,
                                  const ForwardOptions& opts) {
    if (ph.eps != geom.eps)
        throw std::invalid_argument("simulate_sinogram_serial: phantom and geometry eps differ");
    Sinogram out;
    out.geometry = geom;
    out.values.assign(size_t(geom.n_theta) * geom.n_p, 0.0);
    const double band = ph.radius + (phantom_sup_h0(ph) + 1.0) * geom.eps;
    for (int k = geom.k_min(); k <= geom.k_max(); ++k) {
        const double a = geom.alpha(k);
        const double salong = std::cos(a) * ph.center.x + std::sin(a) * ph.center.y;
        for (int j = geom.j_min(); j <= geom.j_max(); ++j) {
            if (std::abs(geom.p(j) - salong) > band) continue;
            out.at(k, j) = smoothed_projection_value(a, geom.p(j), ph, geom.eps, opts);
        }
    }
    return out;
}

} // namespace rtomo
