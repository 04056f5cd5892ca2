#include "rtomo/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtomo {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

double schwarz_phi_gamma(double s, double gamma) {
    const double fl = std::floor(s);
    return fl + std::pow(s - fl, gamma);
}

double schwarz_eval(double s, double gamma) {
    if (s < 0.0) throw std::invalid_argument("schwarz profile needs s >= 0");
    // stop once the remaining terms cannot move the value at the 1e-9
    // level relative to max(1, s); terms decay like (2/3)^n
    const double scale = std::max(1.0, s);
    double acc = 0.0;
    double pow2 = 1.0, pow3 = 1.0;
    for (int n = 0; n < 200; ++n) {
        acc += schwarz_phi_gamma(pow2 * s, gamma) / pow3;
        const double tail = 3.0 * (pow2 * 2.0 * s + 1.0) / (pow3 * 3.0);
        if (tail < 1e-9 * scale) break;
        pow2 *= 2.0;
        pow3 *= 3.0;
    }
    return acc;
}
} // namespace

PerturbationSpec PerturbationSpec::zero() {
    PerturbationSpec s;
    s.kind = PerturbationKind::Zero;
    return s;
}

PerturbationSpec PerturbationSpec::constant(double h) {
    PerturbationSpec s;
    s.kind = PerturbationKind::Constant;
    s.constant_h = h;
    return s;
}

PerturbationSpec PerturbationSpec::sinusoid(double amplitude, double frequency) {
    PerturbationSpec s;
    s.kind = PerturbationKind::Sinusoid;
    s.amplitude = amplitude;
    s.frequency = frequency;
    return s;
}

PerturbationSpec PerturbationSpec::weierstrass_sine(double gamma, double amplitude, double ratio) {
    if (ratio == 0.0) ratio = std::sqrt(12.0);
    if (!(ratio > 1.0) || !(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("weierstrass_sine needs ratio > 1 and gamma in (0,1)");
    PerturbationSpec s;
    s.kind = PerturbationKind::WeierstrassSine;
    s.amplitude = amplitude;
    s.ratio = ratio;
    s.gamma = gamma;
    s.start = int(std::floor(std::log(kPi) / std::log(ratio)));
    s.n_max = weierstrass_n_max(amplitude, ratio, gamma);
    return s;
}

PerturbationSpec PerturbationSpec::schwarz(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("schwarz needs gamma in (0,1)");
    PerturbationSpec s;
    s.kind = PerturbationKind::Schwarz;
    s.gamma = gamma;
    return s;
}

int weierstrass_n_max(double amplitude, double ratio, double gamma) {
    const double q = std::pow(ratio, -gamma);
    const double geo = 1.0 / (1.0 - q);
    int n = 0;
    while (amplitude * std::pow(ratio, -gamma * (n + 1)) * geo >= 1e-8) {
        ++n;
        if (n > 100000) throw std::runtime_error("weierstrass truncation does not converge");
    }
    return n;
}

namespace {
// Per-thread cache of the series frequencies r^n and coefficients
// amp * r^{-gamma n}; the expressions match the definitional ones exactly,
// so cached and uncached evaluation agree bit for bit.
struct WsTable {
    double amplitude = 0.0, ratio = 0.0, gamma = 0.0;
    int start = -1;
    std::vector<double> freq, coef;
};

const WsTable& ws_table(const PerturbationSpec& spec, int upto_n) {
    thread_local WsTable t;
    const size_t need = size_t(upto_n) + 1;
    if (t.amplitude != spec.amplitude || t.ratio != spec.ratio || t.gamma != spec.gamma ||
        t.start != spec.start || t.freq.size() < need) {
        const size_t count = size_t(std::max(upto_n, spec.n_max)) + 1;
        t.amplitude = spec.amplitude;
        t.ratio = spec.ratio;
        t.gamma = spec.gamma;
        t.start = spec.start;
        t.freq.resize(count);
        t.coef.resize(count);
        for (size_t n = 0; n < count; ++n) {
            t.freq[n] = std::pow(spec.ratio, double(n));
            t.coef[n] = spec.amplitude * std::pow(spec.ratio, -spec.gamma * double(n));
        }
    }
    return t;
}
} // namespace

double h0_resume(double s, const PerturbationSpec& spec, int from_n, int upto_n, double acc) {
    const WsTable& t = ws_table(spec, upto_n);
    for (int n = from_n; n <= upto_n; ++n) acc += t.coef[n] * std::sin(t.freq[n] * s);
    return acc;
}

double h0_partial(double s, const PerturbationSpec& spec, int upto_n) {
    return h0_resume(s, spec, spec.start, upto_n, 0.0);
}

double h0_tail_bound(const PerturbationSpec& spec, int after_n) {
    const double q = std::pow(spec.ratio, -spec.gamma);
    return spec.amplitude * std::pow(spec.ratio, -spec.gamma * (after_n + 1)) / (1.0 - q);
}

double h0_eval(double s, const PerturbationSpec& spec) {
    switch (spec.kind) {
    case PerturbationKind::WeierstrassSine:
        return h0_partial(s, spec, spec.n_max);
    case PerturbationKind::Schwarz:
        return schwarz_eval(s, spec.gamma);
    default:
        throw std::invalid_argument("h0_eval: spec has no normalized profile");
    }
}

double h0_normalized(double theta, const PerturbationSpec& spec, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("h0_normalized: eps must be positive");
    double th = std::remainder(theta, 2.0 * kPi); // (-pi, pi]
    const double root = std::sqrt(eps);
    switch (spec.kind) {
    case PerturbationKind::Zero:
        return 0.0;
    case PerturbationKind::Constant:
        return spec.constant_h;
    case PerturbationKind::Sinusoid:
        return spec.amplitude * std::cos(spec.frequency * th / root);
    case PerturbationKind::WeierstrassSine:
        return h0_eval(th / root, spec);
    case PerturbationKind::Schwarz:
        return h0_eval((th + kPi) / root, spec);
    }
    return 0.0;
}

double h_eps(double theta, const PerturbationSpec& spec, double eps) {
    return eps * h0_normalized(theta, spec, eps);
}

double sup_h0_bound(const PerturbationSpec& spec, double s_max) {
    switch (spec.kind) {
    case PerturbationKind::Zero:
        return 0.0;
    case PerturbationKind::Constant:
        return std::abs(spec.constant_h);
    case PerturbationKind::Sinusoid:
        return std::abs(spec.amplitude);
    case PerturbationKind::WeierstrassSine: {
        const double q = std::pow(spec.ratio, -spec.gamma);
        return std::abs(spec.amplitude) * std::pow(spec.ratio, -spec.gamma * spec.start) /
               (1.0 - q);
    }
    case PerturbationKind::Schwarz:
        // phi(u) <= u + 1, so H0(s) <= sum (2^n s + 1)/3^n = 3 s + 3/2
        return 3.0 * std::max(0.0, s_max) + 1.5;
    }
    return 0.0;
}

double holder_ratio_scan(const std::function<double(double)>& fn, double gamma, double lo,
                         double hi, const std::vector<double>& h_values) {
    constexpr int kBase = 2048;
    double worst = 0.0;
    for (double h : h_values) {
        if (!(h > 0.0)) throw std::invalid_argument("holder_ratio_scan: h must be positive");
        const double top = hi - h;
        if (top <= lo) continue;
        const double denom = std::pow(h, gamma);
        for (int i = 0; i < kBase; ++i) {
            const double s = lo + (top - lo) * double(i) / double(kBase);
            const double ratio = std::abs(fn(s + h) - fn(s)) / denom;
            if (ratio > worst) worst = ratio;
        }
    }
    return worst;
}

long level_set_count(const std::function<double(double)>& fn, double t_hat, double lo, double hi,
                     double grid_step) {
    if (!(grid_step > 0.0)) throw std::invalid_argument("level_set_count: grid_step must be > 0");
    long count = 0;
    int prev = 0;
    bool zero_run = false;
    for (long k = 0;; ++k) {
        const double s = lo + double(k) * grid_step;
        if (s > hi) break;
        const double v = fn(s) - t_hat;
        const int sg = (v > 0.0) - (v < 0.0);
        if (sg == 0) {
            if (!zero_run) {
                ++count;
                zero_run = true;
            }
            continue;
        }
        if (zero_run) {
            zero_run = false;
            prev = sg;
            continue;
        }
        if (prev != 0 && sg != prev) ++count;
        prev = sg;
    }
    return count;
}

} // namespace rtomo
