#include "rtomo/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rtomo/quadrature.hpp"

namespace rtomo {

double bspline_eval(int degree, double t) {
    if (degree < 0) throw std::invalid_argument("bspline_eval: negative degree");
    if (t < 0.0 || t > degree + 1.0) return 0.0;
    // b[j] holds B_k(t - j); only j = floor(t) is nonzero at k = 0.
    std::vector<double> b(size_t(degree) + 2, 0.0);
    const int j0 = std::min(int(std::floor(t)), degree);
    b[size_t(j0)] = 1.0;
    for (int k = 1; k <= degree; ++k) {
        for (int j = 0; j <= degree; ++j) {
            const double x = t - double(j);
            b[size_t(j)] = (x / k) * b[size_t(j)] +
                           ((double(k) + 1.0 - x) / k) * b[size_t(j) + 1];
        }
    }
    return b[0];
}

double keys_eval(double t) {
    if (t <= -2.0 || t >= 2.0) return 0.0;
    return 3.0 * bspline_eval(3, t + 2.0) -
           (bspline_eval(2, t + 2.0) + bspline_eval(2, t + 1.0));
}

double aperture_eval(double t) {
    if (t <= -1.0 || t >= 1.0) return 0.0;
    const double q = 1.0 - t * t;
    return (35.0 / 32.0) * q * q * q;
}

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// ik as a piecewise cubic: pieces over [-2,-1], [-1,0], [0,1], [1,2],
// coefficients in ascending powers.  Matches keys_eval to roundoff
// (checked in the tests); used for antiderivatives and moments.
struct Piece {
    double a, b;
    double c[4];
};
constexpr Piece kIkPieces[4] = {
    {-2.0, -1.0, {2.0, 4.0, 2.5, 0.5}},
    {-1.0, 0.0, {1.0, 0.0, -2.5, -1.5}},
    {0.0, 1.0, {1.0, 0.0, -2.5, 1.5}},
    {1.0, 2.0, {2.0, -4.0, 2.5, -0.5}},
};

double piece_antider(const Piece& p, double z) {
    // Int_a^z of the cubic.
    double acc = 0.0;
    for (int k = 3; k >= 0; --k)
        acc = acc * z + p.c[k] / double(k + 1);
    acc *= z;
    double at_a = 0.0;
    for (int k = 3; k >= 0; --k)
        at_a = at_a * p.a + p.c[k] / double(k + 1);
    at_a *= p.a;
    return acc - at_a;
}

// Running integral IK(z) = Int_{-2}^{z} ik.
double ik_antiderivative(double z) {
    if (z <= -2.0) return 0.0;
    double acc = 0.0;
    for (const Piece& p : kIkPieces) {
        if (z >= p.b) {
            acc += piece_antider(p, p.b);
        } else {
            acc += piece_antider(p, z);
            return acc;
        }
    }
    return acc; // z >= 2: total mass 1
}

// Moments I_m = Int s^m ik(s) ds (zero for odd m by symmetry).
double ik_moment(int m) {
    double acc = 0.0;
    for (const Piece& p : kIkPieces)
        for (int k = 0; k < 4; ++k) {
            const int e = m + k + 1;
            acc += p.c[k] * (std::pow(p.b, e) - std::pow(p.a, e)) / double(e);
        }
    return acc;
}

// Coefficients of the log terms in pi*Lambda(t): P_m(t) * ln|t - m| with
// P_m the difference of adjacent ik' pieces (quadratics).
struct LogTerm {
    double x;
    double c2, c1, c0;
};
constexpr LogTerm kLogTerms[5] = {
    {-2.0, 1.5, 5.0, 4.0},
    {-1.0, -6.0, -10.0, -4.0},
    {0.0, 9.0, 0.0, 0.0},
    {1.0, -6.0, 10.0, -4.0},
    {2.0, 1.5, -5.0, 4.0},
};

const std::array<double, 15>& lambda_laurent_mu() {
    static const std::array<double, 15> mu = [] {
        std::array<double, 15> v{};
        for (int l = 0; l < 15; ++l)
            v[size_t(l)] = -double(2 * l + 1) * ik_moment(2 * l);
        return v;
    }();
    return mu;
}

double lambda_log_form(double t) {
    double acc = 0.0;
    for (const LogTerm& lt : kLogTerms) {
        const double d = t - lt.x;
        if (d == 0.0) continue; // the log term has limit 0 at its breakpoint
        acc += ((lt.c2 * t + lt.c1) * t + lt.c0) * std::log(std::abs(d));
    }
    return acc / kPi;
}

double lambda_laurent(double t) {
    const auto& mu = lambda_laurent_mu();
    const double r = 1.0 / (t * t);
    double acc = 0.0;
    for (int l = 14; l >= 0; --l)
        acc = acc * r + mu[size_t(l)];
    return acc * r / kPi;
}

} // namespace

double lambda_kernel(double t) {
    if (std::abs(t) >= 8.0) return lambda_laurent(t);
    return lambda_log_form(t);
}

double radon_of_radial(const std::function<double(double)>& profile, double t,
                       double half_support) {
    const double at = std::abs(t);
    if (at >= half_support) return 0.0;
    const double U = std::sqrt(half_support * half_support - t * t);
    auto f = [&](double u) { return profile(std::sqrt(t * t + u * u)); };
    return 2.0 * gl16_adaptive(f, 0.0, U, 1e-12, 20);
}

namespace {

// Integration panels over [lo,hi] split at the given interior points; panels
// whose endpoint is a split point are graded toward it.
template <class F>
double integrate_with_kinks(const F& f, double lo, double hi,
                            const std::vector<double>& kinks, double tol) {
    std::vector<double> pts;
    pts.push_back(lo);
    for (double k : kinks)
        if (k > lo + 1e-300 && k < hi - 1e-300) pts.push_back(k);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    double acc = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        if (b - a < 1e-14) continue;
        const bool sing_a = i > 0;
        const bool sing_b = i + 2 < pts.size();
        if (sing_a && sing_b) {
            const double m = 0.5 * (a + b);
            acc += gl16_graded(f, a, m, true) + gl16_graded(f, m, b, false);
        } else if (sing_a) {
            acc += gl16_graded(f, a, b, true);
        } else if (sing_b) {
            acc += gl16_graded(f, a, b, false);
        } else {
            acc += gl16_adaptive(f, a, b, tol);
        }
    }
    return acc;
}

TabulatedFunction build_table(double start, double step, size_t n,
                              const std::function<double(double)>& f,
                              OutsideRule rule, double tail_c, double tail_e) {
    TabulatedFunction t;
    t.start = start;
    t.step = step;
    t.rule = rule;
    t.tail_coefficient = tail_c;
    t.tail_exponent = tail_e;
    t.samples.resize(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i)
        t.samples[size_t(i)] = f(start + double(i) * step);
    return t;
}

} // namespace

KernelSet::KernelSet() {
    const double h512 = 1.0 / 512.0;

    // (ik * w)(y): piecewise polynomial in each panel between ik breakpoints.
    auto conv_ik_w = [](double y) {
        if (std::abs(y) >= 3.0) return 0.0;
        std::vector<double> splits;
        for (double m : {-2.0, -1.0, 0.0, 1.0, 2.0}) splits.push_back(y - m);
        std::sort(splits.begin(), splits.end());
        double acc = 0.0;
        double lo = -1.0;
        auto f = [&](double u) { return aperture_eval(u) * keys_eval(y - u); };
        for (double s : splits) {
            if (s > lo && s < 1.0) {
                acc += gl16(f, lo, s);
                lo = s;
            }
        }
        acc += gl16(f, lo, 1.0);
        return acc;
    };
    ik_conv_w_ = build_table(-3.25, h512, 3329, conv_ik_w, OutsideRule::Zero, 0, 0);

    // E(y) = Int w(u) IK(y-u) du with IK the running integral of ik.
    auto edge_fn = [](double y) {
        if (y <= -3.0) return 0.0;
        std::vector<double> splits;
        for (double m : {-2.0, -1.0, 0.0, 1.0, 2.0}) splits.push_back(y - m);
        std::sort(splits.begin(), splits.end());
        double acc = 0.0;
        double lo = -1.0;
        auto f = [&](double u) { return aperture_eval(u) * ik_antiderivative(y - u); };
        for (double s : splits) {
            if (s > lo && s < 1.0) {
                acc += gl16(f, lo, s);
                lo = s;
            }
        }
        acc += gl16(f, lo, 1.0);
        return acc;
    };
    edge_ = build_table(-3.25, h512, 3329, edge_fn, OutsideRule::Zero, 0, 0);

    // G(y) = (Lambda * w)(y).  Lambda has mild kinks (u log u) at +-1, +-2;
    // panels are graded toward the kink images.
    auto conv_lambda_w = [](double y) {
        std::vector<double> kinks;
        for (double m : {-2.0, -1.0, 0.0, 1.0, 2.0}) kinks.push_back(y - m);
        auto f = [&](double v) { return aperture_eval(v) * lambda_kernel(y - v); };
        return integrate_with_kinks(f, -1.0, 1.0, kinks, 1e-13);
    };
    const double h1024 = 1.0 / 1024.0;
    lambda_conv_w_ = build_table(-5.5, h1024, 11265, conv_lambda_w,
                                 OutsideRule::TailPowerLaw, -1.0 / kPi, -2.0);

    // K(rho) table; kernel_K needs lambda_conv_w_, set above.
    auto kfn = [this](double rho) { return kernel_K(rho); };
    k_radial_ = build_table(0.0, h512, 1665, kfn, OutsideRule::Zero, 0, 0);
}

const KernelSet& KernelSet::instance() {
    static const KernelSet ks;
    return ks;
}

double KernelSet::edge_response(double h) const {
    if (h <= -3.0) return 0.0;
    if (h >= 3.0) return 1.0;
    return edge_(h);
}

double KernelSet::kernel_K(double rho) const {
    if (rho < 0.0) throw std::invalid_argument("kernel_K: negative radius");
    auto f = [&](double u) { return lambda_conv_w_(rho * std::cos(u)); };
    if (rho < 1e-12) return lambda_conv_w_(0.0) * 0.5;
    // Split where rho*cos(u) crosses the mild kinks of G.
    std::vector<double> splits;
    for (int m = -3; m <= 3; ++m) {
        const double c = double(m) / rho;
        if (c > -1.0 && c < 1.0) splits.push_back(std::acos(c));
    }
    std::sort(splits.begin(), splits.end());
    double acc = 0.0;
    double lo = 0.0;
    for (double s : splits) {
        if (s > lo + 1e-14 && s < kPi) {
            acc += gl16_adaptive(f, lo, s, 1e-13);
            lo = s;
        }
    }
    acc += gl16_adaptive(f, lo, kPi, 1e-13);
    return acc / (2.0 * kPi);
}

} // namespace rtomo
