#include "rtomo/forward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rtomo/kernels.hpp"
#include "rtomo/quadrature.hpp"

namespace rtomo {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
} // namespace

ScanGeometry ScanGeometry::make(int n_p) {
    if (n_p < 5 || n_p % 2 == 0)
        throw std::invalid_argument("ScanGeometry: N_p must be odd and at least 5");
    ScanGeometry g;
    g.n_p = n_p;
    g.n_theta = n_p - 1;
    g.eps = 1.2 / (n_p - 1);
    g.delta_alpha = kPi / g.n_theta;
    g.kappa = kPi / 1.2;
    return g;
}

double line_integral(double alpha, double s, const PhantomSpec& ph, double fine_step) {
    if (!(fine_step > 0.0) || fine_step > ph.eps / 8.0)
        throw std::invalid_argument("line_integral: fine_step must be in (0, eps/8]");
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

    // midpoint sum of the indicator difference over the global t-lattice,
    // restricted to where the line meets the shell annulus
    const double r_in = std::max(0.0, ph.radius - m * ph.eps);
    const double hi = std::sqrt(r_out * r_out - d * d);
    const double lo = std::sqrt(std::max(0.0, r_in * r_in - d * d));
    const ShellClassifier cls(ph);
    long sum = 0;
    auto window = [&](double a, double b) {
        for (long i = long(std::ceil(a / fine_step - 0.5));; ++i) {
            const double t = (double(i) + 0.5) * fine_step;
            if (t >= b) break;
            sum += cls.sign({s * ca - t * sa, s * sa + t * ca});
        }
    };
    window(tc - hi, tc - lo);
    window(tc + lo, tc + hi);
    return (ph.f_in - ph.f_out) * (chord + double(sum) * fine_step);
}

double smoothed_projection_value(double alpha, double p, const PhantomSpec& ph, double eps,
                                 const ForwardOptions& opts) {
    if (!(eps > 0.0)) throw std::invalid_argument("smoothed_projection: eps must be positive");
    if (!(opts.fine_step_divisor >= 8.0))
        throw std::invalid_argument("smoothed_projection: fine_step_divisor must be >= 8");
    const double fine = eps / opts.fine_step_divisor;
    auto integrand = [&](double u) {
        return aperture_eval(u) * line_integral(alpha, p - eps * u, ph, fine);
    };

    // the chord has square-root kinks where the line grazes the disc; put
    // panel boundaries there and grade the adjacent panels toward them
    const double salong =
        std::cos(alpha) * ph.center.x + std::sin(alpha) * ph.center.y;
    std::vector<double> kinks;
    std::vector<double> cuts = {-1.0, 0.0, 1.0};
    for (double st : {salong - ph.radius, salong + ph.radius}) {
        const double u = (p - st) / eps;
        if (u > -1.25 && u < 1.25) {
            kinks.push_back(u);
            if (u > -1.0 + 1e-12 && u < 1.0 - 1e-12) cuts.push_back(u);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());

    auto near_kink = [&](double u) {
        for (double kk : kinks)
            if (std::abs(kk - u) < 0.26) return true;
        return false;
    };
    auto at_kink = [&](double u) {
        for (double kk : kinks)
            if (std::abs(kk - u) < 1e-11) return true;
        return false;
    };

    double acc = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const bool grade_a = at_kink(a) || (i == 0 && near_kink(a));
        const bool grade_b = at_kink(b) || (i + 2 == cuts.size() && near_kink(b));
        if (grade_a && grade_b) {
            const double mid = 0.5 * (a + b);
            acc += gl16_graded(integrand, a, mid, true, 12);
            acc += gl16_graded(integrand, mid, b, false, 12);
        } else if (grade_a) {
            acc += gl16_graded(integrand, a, b, true, 12);
        } else if (grade_b) {
            acc += gl16_graded(integrand, a, b, false, 12);
        } else {
            acc += gl16_panels(integrand, a, b, opts.panels_per_half);
        }
    }
    return acc;
}

double smoothed_projection(int k, int j, const PhantomSpec& ph, const ScanGeometry& geom,
                           const ForwardOptions& opts) {
    if (k < geom.k_min() || k > geom.k_max() || j < geom.j_min() || j > geom.j_max())
        throw std::out_of_range("smoothed_projection: index outside the scan geometry");
    return smoothed_projection_value(geom.alpha(k), geom.p(j), ph, geom.eps, opts);
}

Sinogram simulate_sinogram(const PhantomSpec& ph, const ScanGeometry& geom,
                           const ForwardOptions& opts) {
    if (ph.eps != geom.eps)
        throw std::invalid_argument("simulate_sinogram: phantom and geometry eps differ");
    Sinogram out;
    out.geometry = geom;
    out.values.assign(size_t(geom.n_theta) * geom.n_p, 0.0);
    const double band = ph.radius + (phantom_sup_h0(ph) + 1.0) * geom.eps;
#pragma omp parallel for schedule(dynamic)
    for (int row = 0; row < geom.n_theta; ++row) {
        const int k = geom.k_min() + row;
        const double a = geom.alpha(k);
        const double salong = std::cos(a) * ph.center.x + std::sin(a) * ph.center.y;
        for (int j = geom.j_min(); j <= geom.j_max(); ++j) {
            if (std::abs(geom.p(j) - salong) > band) continue;
            out.at(k, j) = smoothed_projection_value(a, geom.p(j), ph, geom.eps, opts);
        }
    }
    return out;
}

void write_sinogram(const Sinogram& sino, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    const ScanGeometry& g = sino.geometry;
    std::fprintf(f, "# sinogram v1\n");
    std::fprintf(f, "# N_p=%d N_theta=%d eps=%.17g\n", g.n_p, g.n_theta, g.eps);
    for (int k = g.k_min(); k <= g.k_max(); ++k) {
        for (int j = g.j_min(); j <= g.j_max(); ++j) {
            std::fprintf(f, j == g.j_min() ? "%.17g" : ",%.17g", sino.at(k, j));
        }
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

Sinogram read_sinogram(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    char line[64];
    if (!std::fgets(line, sizeof line, f) || std::string(line) != "# sinogram v1\n") {
        std::fclose(f);
        throw std::runtime_error("not a sinogram file: " + path);
    }
    int n_p = 0, n_theta = 0;
    double eps = 0.0;
    if (!std::fgets(line, sizeof line, f) ||
        std::sscanf(line, "# N_p=%d N_theta=%d eps=%lg", &n_p, &n_theta, &eps) != 3) {
        std::fclose(f);
        throw std::runtime_error("bad sinogram header: " + path);
    }
    ScanGeometry g;
    try {
        g = ScanGeometry::make(n_p);
    } catch (const std::invalid_argument&) {
        std::fclose(f);
        throw std::runtime_error("bad sinogram geometry: " + path);
    }
    if (g.n_theta != n_theta || g.eps != eps) {
        std::fclose(f);
        throw std::runtime_error("inconsistent sinogram header: " + path);
    }
    Sinogram out;
    out.geometry = g;
    out.values.assign(size_t(g.n_theta) * g.n_p, 0.0);
    for (size_t idx = 0; idx < out.values.size(); ++idx) {
        double v = 0.0;
        if (std::fscanf(f, idx % g.n_p == 0 ? " %lg" : " ,%lg", &v) != 1) {
            std::fclose(f);
            throw std::runtime_error("truncated sinogram data: " + path);
        }
        out.values[idx] = v;
    }
    std::fclose(f);
    return out;
}

} // namespace rtomo
