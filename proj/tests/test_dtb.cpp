#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtomo/dtb.hpp"
#include "rtomo/forward.hpp"
#include "rtomo/kernels.hpp"
#include "rtomo/phantom.hpp"
#include "rtomo/recon.hpp"

using namespace rtomo;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

PhantomSpec constant_phantom(double eps, double h) {
    PhantomSpec ph;
    ph.eps = eps;
    ph.perturbation.kind = PerturbationKind::Constant;
    ph.perturbation.constant_h = h;
    return ph;
}

PhantomSpec wsine_phantom(double eps) {
    PhantomSpec ph;
    ph.eps = eps;
    ph.perturbation.kind = PerturbationKind::WeierstrassSine;
    return ph;
}

} // namespace

TEST_CASE("original profile saturates away from the edge") {
    const double eps = 1.2 / 250.0;
    for (PhantomSpec ph : {constant_phantom(eps, 1.5), wsine_phantom(eps)}) {
        ph.f_in = 2.5;
        ph.f_out = -0.75;
        const LocalFrame fr = local_frame(1.32 * kPi, ph);
        REQUIRE(std::abs(fr.h0_local) <= 2.0);
        CHECK(dtb_original(-5.5, fr, ph) == ph.f_in);
        CHECK(dtb_original(5.5, fr, ph) == ph.f_out);

        PhantomSpec shell = ph;
        shell.mode = PhantomMode::ShellOnly;
        CHECK(dtb_original(-5.5, fr, shell) == 0.0);
        CHECK(dtb_original(5.5, fr, shell) == 0.0);
    }
}

TEST_CASE("constant perturbation shifts the edge response exactly") {
    const double eps = 1.2 / 250.0;
    PhantomSpec pert = constant_phantom(eps, 1.5);
    PhantomSpec flat;
    flat.eps = eps;
    const LocalFrame fr_pert = local_frame(0.9, pert);
    const LocalFrame fr_flat = local_frame(0.9, flat);
    REQUIRE(fr_pert.h0_local == 1.5);

    const KernelSet& ks = KernelSet::instance();
    for (double sh = -6.0; sh <= 6.0; sh += 0.125) {
        CHECK(dtb_original(sh, fr_pert, pert) == dtb_original(sh - 1.5, fr_flat, flat));

        PhantomSpec shell = pert;
        shell.mode = PhantomMode::ShellOnly;
        const double band = ks.edge_response(sh) - ks.edge_response(sh - 1.5);
        CHECK(std::abs(dtb_original(sh, fr_pert, shell) - band) <= 1e-12);
    }
}

TEST_CASE("transition midpoint sits at the local perturbation") {
    const double eps = 1.2 / 500.0;
    for (PhantomSpec ph : {constant_phantom(eps, 1.5), wsine_phantom(eps), PhantomSpec{}}) {
        ph.eps = eps;
        ph.f_in = 3.0;
        ph.f_out = 1.0;
        const LocalFrame fr = local_frame(1.32 * kPi, ph);
        CHECK(dtb_original(fr.h0_local, fr, ph) ==
              doctest::Approx(0.5 * (ph.f_in + ph.f_out)).epsilon(1e-9));
    }
}

TEST_CASE("new DTB vanishes away from the shell") {
    PhantomSpec shell = wsine_phantom(1.2 / 250.0);
    shell.mode = PhantomMode::ShellOnly;

    CHECK(dtb_new(shell.center, shell) == 0.0);
    CHECK(dtb_new({shell.center.x + 2.0 * shell.radius, shell.center.y}, shell) == 0.0);
    // Full mode far outside the disc: every sample sees f_out.
    PhantomSpec full = wsine_phantom(1.2 / 250.0);
    full.f_out = -0.3;
    const double far = dtb_new({full.center.x, full.center.y - 2.0 * full.radius}, full);
    CHECK(far == doctest::Approx(-0.3).epsilon(2e-3));
}

TEST_CASE("new DTB reproduces the plateau") {
    PhantomSpec ph;
    ph.eps = 1.2 / 500.0;
    ph.f_in = 1.0;
    const double v = dtb_new(ph.center, ph);
    INFO("dtb_new at the center = ", v);
    CHECK(std::abs(v - ph.f_in) <= 2e-3);

    CHECK_THROWS_AS(dtb_new(ph.center, ph, 0), std::invalid_argument);
}

TEST_CASE("quadrature refinement is stable") {
    PhantomSpec ph = wsine_phantom(1.2 / 250.0);
    const LocalFrame fr = local_frame(1.32 * kPi, ph);
    for (double sh : {-0.7, 0.3, 1.2}) {
        const Vec2 x = fr.x0 + (ph.eps * sh) * fr.outward_unit;
        const double d = std::abs(dtb_new(x, ph, 64) - dtb_new(x, ph, 128));
        INFO("refinement difference at s_hat = ", sh, ": ", d);
        CHECK(d < 5e-4);
    }
}

TEST_CASE("profiles have the pinned shape") {
    const ScanGeometry g = ScanGeometry::make(51);
    PhantomSpec ph;
    ph.eps = g.eps;
    const Sinogram sino = simulate_sinogram(ph, g);
    const LocalFrame fr = local_frame(1.32 * kPi, ph);
    const double half = 8.0 * g.eps;
    FilteredProjections fp = filter_projections(
        sino, Region{fr.x0.x - half, fr.x0.x + half, fr.x0.y - half, fr.x0.y + half});

    ProfileSpec spec;
    spec.frame = fr;
    spec.s_hat_lo = -5.0;
    spec.s_hat_hi = 5.0;
    spec.step = 0.25;
    const ProfileSeries series = extract_profiles(spec, ph, fp);
    CHECK(series.s_hat.size() == 41);
    CHECK(series.recon.size() == 41);
    CHECK(series.dtb_original.size() == 41);
    CHECK(series.dtb_new.size() == 41);
    CHECK(series.ideal.size() == 41);
    CHECK(series.s_hat.front() == -5.0);
    CHECK(series.s_hat.back() == 5.0);

    // ceil form for a range that is not a whole number of steps
    ProfileSpec ragged = spec;
    ragged.s_hat_hi = -4.4;
    ragged.step = 0.25;
    CHECK(extract_profiles(ragged, ph, fp).s_hat.size() == 4);

    for (size_t i = 0; i < series.s_hat.size(); ++i) {
        CHECK(std::isfinite(series.recon[i]));
        // ideal is the sharp step at h0_local (= 0 here); the sample exactly on
        // the boundary depends on the last-ulp rounding of x0, so skip it
        if (series.s_hat[i] == 0.0) continue;
        CHECK(series.ideal[i] == (series.s_hat[i] < 0.0 ? ph.f_in : ph.f_out));
    }

    ProfileSpec bad = spec;
    bad.step = 0.0;
    CHECK_THROWS_AS(extract_profiles(bad, ph, fp), std::invalid_argument);
    ProfileSpec inverted = spec;
    inverted.s_hat_lo = 2.0;
    inverted.s_hat_hi = -2.0;
    CHECK_THROWS_AS(extract_profiles(inverted, ph, fp), std::invalid_argument);
    ProfileSpec wide = spec;
    wide.s_hat_lo = -200.0;
    wide.s_hat_hi = 200.0;
    CHECK_THROWS_AS(extract_profiles(wide, ph, fp), std::out_of_range);
}

TEST_CASE("zero-perturbation profile tracks the original DTB") {
    const ScanGeometry g = ScanGeometry::make(1001);
    PhantomSpec ph;
    ph.eps = g.eps;
    const Sinogram sino = simulate_sinogram(ph, g);
    const LocalFrame fr = local_frame(1.32 * kPi, ph);
    const double half = 20.0 * g.eps;
    FilteredProjections fp = filter_projections(
        sino, Region{fr.x0.x - half, fr.x0.x + half, fr.x0.y - half, fr.x0.y + half});

    ProfileSpec spec;
    spec.frame = fr;
    spec.s_hat_lo = -15.0;
    spec.s_hat_hi = 15.0;
    const ProfileSeries series = extract_profiles(spec, ph, fp);
    double acc = 0.0;
    for (size_t i = 0; i < series.s_hat.size(); ++i) {
        const double d = series.recon[i] - series.dtb_original[i];
        acc += d * d;
    }
    const double rms = std::sqrt(acc / double(series.s_hat.size()));
    INFO("RMS(recon - dtb_original) at N_p=1001 = ", rms);
    CHECK(rms < 0.03);
}

TEST_CASE("profile csv round-trip") {
    ProfileSeries s;
    s.s_hat = {-1.0, 0.25, 2.0};
    s.recon = {0.981234567890123, 0.5, 0.0123};
    s.dtb_original = {1.0, 0.5, 0.011};
    s.dtb_new = {0.99, 0.51, 0.013};
    s.ideal = {1.0, 0.0, 0.0};

    const std::string path = "test_dtb_profile.csv";
    write_profile_csv(s, path);
    const ProfileSeries back = read_profile_csv(path);
    REQUIRE(back.s_hat.size() == s.s_hat.size());
    for (size_t i = 0; i < s.s_hat.size(); ++i) {
        CHECK(back.s_hat[i] == s.s_hat[i]);
        CHECK(back.recon[i] == s.recon[i]);
        CHECK(back.dtb_original[i] == s.dtb_original[i]);
        CHECK(back.dtb_new[i] == s.dtb_new[i]);
        CHECK(back.ideal[i] == s.ideal[i]);
    }
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_profile_csv("no_such_profile.csv"), std::runtime_error);
    {
        std::ofstream bad("test_dtb_bad.csv");
        bad << "s_hat,recon\n1,2\n";
    }
    CHECK_THROWS_AS(read_profile_csv("test_dtb_bad.csv"), std::runtime_error);
    std::remove("test_dtb_bad.csv");
    {
        std::ofstream empty("test_dtb_empty.csv");
        empty << "s_hat,recon,dtb_original,dtb_new,ideal\n";
    }
    CHECK_THROWS_AS(read_profile_csv("test_dtb_empty.csv"), std::runtime_error);
    std::remove("test_dtb_empty.csv");
}
