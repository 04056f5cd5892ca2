#pragma once

#include <string>
#include <vector>

#include "rtomo/phantom.hpp"

namespace rtomo {

// Parallel-beam sampling: detector pitch eps spanning [-0.6, 0.6], angles
// alpha_k = k * pi/N_theta covering [-pi/2, pi/2) with the +pi/2 duplicate
// line family dropped.
struct ScanGeometry {
    int n_p = 0;
    int n_theta = 0;
    double eps = 0.0;
    double delta_alpha = 0.0;
    double kappa = 0.0; // delta_alpha / eps, pinned to pi/1.2 by the grid couplings

    static ScanGeometry make(int n_p);

    int j_min() const { return -(n_p - 1) / 2; }
    int j_max() const { return (n_p - 1) / 2; }
    int k_min() const { return -n_theta / 2; }
    int k_max() const { return n_theta / 2 - 1; }
    double p(int j) const { return j * eps; }
    double alpha(int k) const { return k * delta_alpha; }
};

struct Sinogram {
    ScanGeometry geometry;
    std::vector<double> values; // (k, j) row-major, both ascending

    double& at(int k, int j) {
        return values[size_t(k - geometry.k_min()) * geometry.n_p + size_t(j - geometry.j_min())];
    }
    double at(int k, int j) const {
        return values[size_t(k - geometry.k_min()) * geometry.n_p + size_t(j - geometry.j_min())];
    }
};

// Quadrature controls for the data simulation; the defaults are the
// contract, the refinement knobs exist for stability checks.
struct ForwardOptions {
    double fine_step_divisor = 16.0; // fine_step = eps / divisor, must be >= 8
    int panels_per_half = 1;         // Gauss-Legendre 16 blocks per half-aperture
};

// Integral of the phantom (minus its background level) along the line
// s*(cos a, sin a) + t*(-sin a, cos a). The unperturbed-disc part is the
// analytic chord; the perturbation correction is a midpoint sum over the
// global t-lattice restricted to the shell annulus windows.
double line_integral(double alpha, double s, const PhantomSpec& phantom, double fine_step);

// Aperture-smoothed projection (1/eps) * int w((p-s)/eps) Rf(alpha, s) ds
// at arbitrary (alpha, p).
double smoothed_projection_value(double alpha, double p, const PhantomSpec& phantom, double eps,
                                 const ForwardOptions& opts = {});

double smoothed_projection(int k, int j, const PhantomSpec& phantom, const ScanGeometry& geom,
                           const ForwardOptions& opts = {});

Sinogram simulate_sinogram(const PhantomSpec& phantom, const ScanGeometry& geom,
                           const ForwardOptions& opts = {});

void write_sinogram(const Sinogram& sino, const std::string& path);
Sinogram read_sinogram(const std::string& path);

} // namespace rtomo
