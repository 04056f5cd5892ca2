#pragma once

#include <string>
#include <vector>

#include "rtomo/phantom.hpp"
#include "rtomo/recon.hpp"

namespace rtomo {

// Radial profile geometry through a boundary base point, in eps units along
// the outward normal of the unperturbed circle.
struct ProfileSpec {
    LocalFrame frame;
    double s_hat_lo = -25.0;
    double s_hat_hi = 25.0;
    double step = 0.25;
};

struct ProfileSeries {
    std::vector<double> s_hat;
    std::vector<double> recon;
    std::vector<double> dtb_original;
    std::vector<double> dtb_new;
    std::vector<double> ideal;
};

// Closed-form limiting profile at the frame's base point: the unperturbed
// edge response shifted by the local normalized perturbation. Full mode
// gives f_out + df * (1 - E(s_hat - h0)); ShellOnly gives the band response
// df * (E(s_hat) - E(s_hat - h0)).
double dtb_original(double s_hat, const LocalFrame& frame, const PhantomSpec& phantom);

// Kernel-smoothed sharp object (1/eps^2) Int K(|x-y|/eps) f(y) dy, midpoint
// tensor quadrature of step eps/divisor over the support disc |x-y| <= 3 eps.
double dtb_new(Vec2 x, const PhantomSpec& phantom, int divisor = 64);

// Samples the reconstruction and all three model profiles along the outward
// radial line. recon comes from fp, which must cover the profile segment.
ProfileSeries extract_profiles(const ProfileSpec& spec, const PhantomSpec& phantom,
                               const FilteredProjections& fp);

void write_profile_csv(const ProfileSeries& series, const std::string& path);
ProfileSeries read_profile_csv(const std::string& path);

} // namespace rtomo
