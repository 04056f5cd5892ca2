#pragma once

#include <functional>
#include <vector>

namespace rtomo {

enum class PerturbationKind { Zero, Constant, Sinusoid, WeierstrassSine, Schwarz };

// Radial boundary perturbation H_eps(theta) = eps * H0(theta / sqrt(eps)).
// Factories fill in the derived fields (series start, truncation length).
struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::Zero;
    double constant_h = 0.0; // Constant: offset in eps units
    double amplitude = 2.0;  // Sinusoid / WeierstrassSine
    double frequency = 0.71; // Sinusoid
    double gamma = 0.5;      // WeierstrassSine / Schwarz smoothness exponent
    double ratio = 0.0;      // WeierstrassSine lacunary ratio r
    int start = 0;           // WeierstrassSine first series index
    int n_max = 0;           // WeierstrassSine truncation index

    static PerturbationSpec zero();
    static PerturbationSpec constant(double h);
    static PerturbationSpec sinusoid(double amplitude = 2.0, double frequency = 0.71);
    static PerturbationSpec weierstrass_sine(double gamma = 0.5, double amplitude = 5.0,
                                             double ratio = 0.0);
    static PerturbationSpec schwarz(double gamma = 0.5);
};

// Smallest n with amplitude * r^{-gamma (n+1)} / (1 - r^{-gamma}) < 1e-8.
int weierstrass_n_max(double amplitude, double ratio, double gamma);

// Normalized profile H0(s). Defined for WeierstrassSine (any s) and
// Schwarz (s >= 0 only); other kinds have no H0 and throw.
double h0_eval(double s, const PerturbationSpec& spec);

// Partial sum of the WeierstrassSine series over n = start..upto_n, summed in
// the same ascending order as h0_eval, so h0_partial(s, n_max) == h0_eval(s)
// bitwise. Used by the certified shell classifier.
double h0_partial(double s, const PerturbationSpec& spec, int upto_n);

// Continues a WeierstrassSine partial sum over n = from_n..upto_n starting
// from acc. Chaining resumes reproduces h0_partial bit for bit, which lets
// point classification stop the series early yet stay exactly consistent
// with the full evaluation.
double h0_resume(double s, const PerturbationSpec& spec, int from_n, int upto_n, double acc);

// Rigorous bound on the WeierstrassSine series tail beyond index after_n.
double h0_tail_bound(const PerturbationSpec& spec, int after_n);

// Radial perturbation at polar angle theta. The angle is wrapped to
// (-pi, pi] first; Schwarz shifts it by +pi so its profile argument
// stays nonnegative.
double h_eps(double theta, const PerturbationSpec& spec, double eps);

// h_eps / eps without the final scaling, exact for the constant kind.
double h0_normalized(double theta, const PerturbationSpec& spec, double eps);

// Upper bound on |H0| over profile arguments in [-s_max, s_max]
// (equivalently [0, s_max] for Schwarz).
double sup_h0_bound(const PerturbationSpec& spec, double s_max);

// Largest |fn(s+h) - fn(s)| / h^gamma over 2048 base points in [lo, hi - h]
// and all listed step sizes. Empirical lower bound for a Hoelder constant.
double holder_ratio_scan(const std::function<double(double)>& fn, double gamma, double lo,
                         double hi, const std::vector<double>& h_values);

// Number of sign changes of fn - t_hat sampled at lo, lo+step, ... <= hi.
// A run of exact zeros counts as one crossing. Tangencies between grid
// points are missed, so this is a lower bound on the level-set count.
long level_set_count(const std::function<double(double)>& fn, double t_hat, double lo, double hi,
                     double grid_step);

} // namespace rtomo
