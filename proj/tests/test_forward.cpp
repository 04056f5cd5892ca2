#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "rtomo/forward.hpp"
#include "rtomo/kernels.hpp"
#include "rtomo/quadrature.hpp"
#include "rtomo/reference.hpp"

using namespace rtomo;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

uint64_t rng_state = 0x2545f4914f6cdd1dull;
double rng_uniform() {
    rng_state ^= rng_state << 13;
    rng_state ^= rng_state >> 7;
    rng_state ^= rng_state << 17;
    return double(rng_state >> 11) / 9007199254740992.0;
}

PhantomSpec disc_phantom(double eps) {
    PhantomSpec ph;
    ph.eps = eps;
    return ph; // centered (0.1, 0.2), radius 0.3, f_in 1, f_out 0, unperturbed
}

double center_offset(double alpha, const PhantomSpec& ph) {
    return std::cos(alpha) * ph.center.x + std::sin(alpha) * ph.center.y;
}

// Aperture-smoothed analytic chord of the unperturbed disc, integrated
// adaptively on the pieces between the tangency kinks.
double smoothed_chord_oracle(double alpha, double p, const PhantomSpec& ph, double eps) {
    const double sc = center_offset(alpha, ph);
    auto f = [&](double u) {
        const double d = p - eps * u - sc;
        const double q = ph.radius * ph.radius - d * d;
        return aperture_eval(u) * (q > 0.0 ? ph.f_in * 2.0 * std::sqrt(q) : 0.0);
    };
    std::vector<double> cuts = {-1.0, 1.0};
    for (double st : {sc - ph.radius, sc + ph.radius}) {
        const double u = (p - st) / eps;
        if (u > -1.0 && u < 1.0) cuts.push_back(u);
    }
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += gl16_adaptive(f, cuts[i], cuts[i + 1], 1e-12);
    return acc;
}

double max_abs(const Sinogram& s) {
    double m = 0.0;
    for (double v : s.values) m = std::max(m, std::abs(v));
    return m;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("scan geometry fixes the grid couplings") {
    const ScanGeometry g = ScanGeometry::make(501);
    CHECK(g.n_theta == 500);
    CHECK(g.eps == 1.2 / 500);
    CHECK(g.kappa == kPi / 1.2);
    CHECK(g.delta_alpha == doctest::Approx(g.kappa * g.eps).epsilon(1e-15));
    CHECK(g.j_min() == -250);
    CHECK(g.j_max() == 250);
    CHECK(g.k_min() == -250);
    CHECK(g.k_max() == 249);
    CHECK(g.p(0) == 0.0);
    CHECK(g.p(3) == 3 * g.eps);
    CHECK(g.alpha(g.k_min()) == doctest::Approx(-kPi / 2).epsilon(1e-15));
    CHECK(g.alpha(g.k_max()) == doctest::Approx(kPi / 2 - g.delta_alpha).epsilon(1e-15));

    CHECK(ScanGeometry::make(5).eps == doctest::Approx(0.3));
    CHECK_THROWS_AS(ScanGeometry::make(100), std::invalid_argument);
    CHECK_THROWS_AS(ScanGeometry::make(3), std::invalid_argument);
}

TEST_CASE("line integral of the plain disc") {
    const PhantomSpec ph = disc_phantom(1.2 / 500);
    const double fine = ph.eps / 16;

    SUBCASE("diametral line carries the full chord") {
        CHECK(line_integral(0.0, ph.center.x, ph, fine) == doctest::Approx(0.6).epsilon(1e-12));
        const double a = 0.87;
        CHECK(line_integral(a, center_offset(a, ph), ph, fine) ==
              doctest::Approx(0.6).epsilon(1e-12));
    }
    SUBCASE("a miss is exactly zero") {
        CHECK(line_integral(0.0, 0.9, ph, fine) == 0.0);
        CHECK(line_integral(1.3, center_offset(1.3, ph) + ph.radius + 2 * ph.eps, ph, fine) == 0.0);
    }
    SUBCASE("coarse sampling is rejected") {
        CHECK_THROWS_AS(line_integral(0.0, 0.1, ph, ph.eps / 7.9), std::invalid_argument);
        CHECK_THROWS_AS(line_integral(0.0, 0.1, ph, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(line_integral(0.0, 0.1, ph, -1.0), std::invalid_argument);
    }
}

TEST_CASE("shell-only line integrals are differences of full ones") {
    PhantomSpec pert = disc_phantom(1.2 / 150);
    pert.perturbation = PerturbationSpec::weierstrass_sine();
    pert.f_in = 1.7;
    pert.f_out = 0.4;
    PhantomSpec plain = pert;
    plain.perturbation = PerturbationSpec::zero();
    PhantomSpec shell = pert;
    shell.mode = PhantomMode::ShellOnly;

    const double fine = pert.eps / 16;
    const double reach = pert.radius + (phantom_sup_h0(pert) + 1.0) * pert.eps;
    for (int i = 0; i < 100; ++i) {
        const double a = 2.0 * kPi * rng_uniform();
        const double s = center_offset(a, pert) + (2.2 * rng_uniform() - 1.1) * reach;
        const double got = line_integral(a, s, shell, fine);
        const double want = line_integral(a, s, pert, fine) - line_integral(a, s, plain, fine);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("annulus windows reproduce dense sampling bit for bit") {
    std::vector<PhantomSpec> phantoms;
    {
        PhantomSpec a = disc_phantom(1.2 / 150);
        a.perturbation = PerturbationSpec::weierstrass_sine();
        phantoms.push_back(a);
        PhantomSpec b = disc_phantom(1.2 / 150);
        b.perturbation = PerturbationSpec::sinusoid();
        b.mode = PhantomMode::ShellOnly;
        b.f_in = 2.0;
        phantoms.push_back(b);
        PhantomSpec c = disc_phantom(1.2 / 150);
        c.perturbation = PerturbationSpec::constant(-3.0);
        phantoms.push_back(c);
    }
    for (const PhantomSpec& ph : phantoms) {
        const double fine = ph.eps / 16;
        const double reach = ph.radius + (phantom_sup_h0(ph) + 1.0) * ph.eps;
        for (int i = 0; i < 60; ++i) {
            const double a = 2.0 * kPi * rng_uniform();
            const double s = center_offset(a, ph) + (2.4 * rng_uniform() - 1.2) * reach;
            CHECK(line_integral(a, s, ph, fine) == line_integral_dense(a, s, ph, fine));
        }
    }
}

TEST_CASE("constant offsets reproduce the enlarged chord and refine linearly") {
    for (double h : {2.5, -3.0}) {
        PhantomSpec ph = disc_phantom(1.2 / 500);
        ph.perturbation = PerturbationSpec::constant(h);
        const double r2 = ph.radius + ph.eps * h;
        double e16 = 0.0, e256 = 0.0;
        for (int i = 0; i < 40; ++i) {
            const double a = 2.0 * kPi * rng_uniform();
            const double d = (2.4 * rng_uniform() - 1.2) * r2;
            const double s = center_offset(a, ph) + d;
            const double want = std::abs(d) < r2 ? 2.0 * std::sqrt(r2 * r2 - d * d) : 0.0;
            e16 = std::max(e16, std::abs(line_integral(a, s, ph, ph.eps / 16) - want));
            e256 = std::max(e256, std::abs(line_integral(a, s, ph, ph.eps / 256) - want));
        }
        CHECK(e16 < 5e-4);
        CHECK(e256 < 2.5e-5);
        CHECK(e256 < e16 / 2 + 1e-6);
    }
}

TEST_CASE("smoothed projection nearest the center offset carries the diameter") {
    const ScanGeometry g = ScanGeometry::make(501);
    const PhantomSpec ph = disc_phantom(g.eps);
    const int k = 77;
    const int j = int(std::lround(center_offset(g.alpha(k), ph) / g.eps));
    CHECK(smoothed_projection(k, j, ph, g) == doctest::Approx(0.6).epsilon(2e-5));

    CHECK_THROWS_AS(smoothed_projection(g.k_max() + 1, 0, ph, g), std::out_of_range);
    CHECK_THROWS_AS(smoothed_projection(0, g.j_max() + 1, ph, g), std::out_of_range);
    CHECK_THROWS_AS(smoothed_projection(g.k_min() - 1, 0, ph, g), std::out_of_range);
}

TEST_CASE("projections vanish beyond the detector band") {
    const ScanGeometry g = ScanGeometry::make(101);
    const PhantomSpec ph = disc_phantom(g.eps);
    for (int k : {-50, -17, 0, 23, 49}) {
        const double sc = center_offset(g.alpha(k), ph);
        for (int j = g.j_min(); j <= g.j_max(); ++j) {
            if (std::abs(g.p(j) - sc) > ph.radius + 2 * g.eps)
                CHECK(smoothed_projection(k, j, ph, g) == 0.0);
        }
    }
}

TEST_CASE("projection is even about the center offset") {
    const double eps = 1.2 / 100;
    const PhantomSpec ph = disc_phantom(eps);
    const double a = 0.32 * kPi;
    const double sc = center_offset(a, ph);
    for (double d : {0.05, 0.13, 0.29, 0.301}) {
        const double hi = smoothed_projection_value(a, sc + d, ph, eps);
        const double lo = smoothed_projection_value(a, sc - d, ph, eps);
        CHECK(hi == doctest::Approx(lo).epsilon(1e-10));
    }
}

TEST_CASE("sinogram of a centered disc is even in j") {
    const ScanGeometry g = ScanGeometry::make(101);
    PhantomSpec ph = disc_phantom(g.eps);
    ph.center = {0.0, 0.0};
    const Sinogram s = simulate_sinogram(ph, g);
    for (int k = g.k_min(); k <= g.k_max(); ++k)
        for (int j = 1; j <= g.j_max(); ++j)
            CHECK(s.at(k, j) == doctest::Approx(s.at(k, -j)).epsilon(1e-12));
}

TEST_CASE("plain-disc sinogram matches the analytic smoothed chord") {
    const ScanGeometry g = ScanGeometry::make(101);
    const PhantomSpec ph = disc_phantom(g.eps);
    const Sinogram s = simulate_sinogram(ph, g);
    const double band = ph.radius + (phantom_sup_h0(ph) + 1.0) * g.eps;
    double worst = 0.0;
    for (int k = g.k_min(); k <= g.k_max(); ++k) {
        const double sc = center_offset(g.alpha(k), ph);
        for (int j = g.j_min(); j <= g.j_max(); ++j) {
            const double v = s.at(k, j);
            CHECK(std::isfinite(v));
            if (std::abs(g.p(j) - sc) > band) {
                CHECK(v == 0.0);
                continue;
            }
            worst = std::max(worst, std::abs(v - smoothed_chord_oracle(g.alpha(k), g.p(j), ph, g.eps)));
        }
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("shell-only sinogram equals the difference of full sinograms") {
    const ScanGeometry g = ScanGeometry::make(51);
    PhantomSpec pert = disc_phantom(g.eps);
    pert.perturbation = PerturbationSpec::weierstrass_sine();
    PhantomSpec plain = pert;
    plain.perturbation = PerturbationSpec::zero();
    PhantomSpec shell = pert;
    shell.mode = PhantomMode::ShellOnly;

    const Sinogram s_pert = simulate_sinogram(pert, g);
    const Sinogram s_plain = simulate_sinogram(plain, g);
    const Sinogram s_shell = simulate_sinogram(shell, g);
    for (size_t i = 0; i < s_shell.values.size(); ++i) {
        const double want = s_pert.values[i] - s_plain.values[i];
        CHECK(s_shell.values[i] == doctest::Approx(want).epsilon(1e-9));
    }

    SUBCASE("parallel rows agree with the serial reference exactly") {
        const Sinogram serial = simulate_sinogram_serial(shell, g);
        REQUIRE(serial.values.size() == s_shell.values.size());
        for (size_t i = 0; i < serial.values.size(); ++i)
            CHECK(serial.values[i] == s_shell.values[i]);
    }
}

TEST_CASE("shell data magnitude stays bounded as the grid refines") {
    ForwardOptions fast;
    fast.fine_step_divisor = 8.0;
    double prev = 0.0;
    bool first = true;
    for (int n_p : {151, 251}) {
        const ScanGeometry g = ScanGeometry::make(n_p);
        PhantomSpec shell = disc_phantom(g.eps);
        shell.perturbation = PerturbationSpec::weierstrass_sine();
        shell.mode = PhantomMode::ShellOnly;
        const Sinogram s = simulate_sinogram(shell, g, fast);
        const double m = max_abs(s);
        CHECK(m < 1.0);
        if (!first) CHECK(m < prev * 1.1 + 0.02);
        prev = m;
        first = false;
    }
}

TEST_CASE("refinement stability of the simulated data") {
    ForwardOptions fine;
    fine.fine_step_divisor = 32.0;
    fine.panels_per_half = 2;

    SUBCASE("plain disc, every entry") {
        const ScanGeometry g = ScanGeometry::make(251);
        const PhantomSpec ph = disc_phantom(g.eps);
        const Sinogram base = simulate_sinogram(ph, g);
        const Sinogram ref = simulate_sinogram(ph, g, fine);
        double worst = 0.0;
        for (size_t i = 0; i < base.values.size(); ++i)
            worst = std::max(worst, std::abs(base.values[i] - ref.values[i]));
        CHECK(worst < 1e-5);
    }

    // sampled indicator shells carry O(fine_step) quantization noise, so the
    // perturbed data only refines at that scale
    SUBCASE("sinusoidal shell, sampled rows") {
        const ScanGeometry g = ScanGeometry::make(251);
        PhantomSpec ph = disc_phantom(g.eps);
        ph.perturbation = PerturbationSpec::sinusoid();
        const double band = ph.radius + (phantom_sup_h0(ph) + 1.0) * g.eps;
        double worst = 0.0, sq = 0.0;
        int count = 0;
        for (int k : {-125, -97, -60, -21, 0, 19, 58, 96, 124}) {
            const double sc = center_offset(g.alpha(k), ph);
            for (int j = g.j_min(); j <= g.j_max(); ++j) {
                if (std::abs(g.p(j) - sc) > band) continue;
                const double a = smoothed_projection(k, j, ph, g);
                const double b = smoothed_projection(k, j, ph, g, fine);
                worst = std::max(worst, std::abs(a - b));
                sq += (a - b) * (a - b);
                ++count;
            }
        }
        CHECK(worst < 2e-3);
        CHECK(std::sqrt(sq / count) < 5e-4);
    }
}

TEST_CASE("sinogram files round-trip bit for bit") {
    const ScanGeometry g = ScanGeometry::make(51);
    PhantomSpec ph = disc_phantom(g.eps);
    ph.perturbation = PerturbationSpec::sinusoid();
    const Sinogram s = simulate_sinogram(ph, g);

    const std::string p1 = "sino_rt1.csv", p2 = "sino_rt2.csv";
    write_sinogram(s, p1);
    const Sinogram r = read_sinogram(p1);
    CHECK(r.geometry.n_p == g.n_p);
    CHECK(r.geometry.n_theta == g.n_theta);
    CHECK(r.geometry.eps == g.eps);
    REQUIRE(r.values.size() == s.values.size());
    for (size_t i = 0; i < r.values.size(); ++i) CHECK(r.values[i] == s.values[i]);

    write_sinogram(r, p2);
    CHECK(slurp(p1) == slurp(p2));

    SUBCASE("malformed files are rejected") {
        CHECK_THROWS_AS(read_sinogram("no_such_file.csv"), std::runtime_error);
        {
            std::ofstream out("sino_bad1.csv");
            out << "hello\n1,2,3\n";
        }
        CHECK_THROWS_AS(read_sinogram("sino_bad1.csv"), std::runtime_error);
        {
            std::ofstream out("sino_bad2.csv");
            out << "# sinogram v1\n# N_p=51 N_theta=50 eps=0.5\n";
        }
        CHECK_THROWS_AS(read_sinogram("sino_bad2.csv"), std::runtime_error);
        {
            std::string text = slurp(p1);
            std::ofstream out("sino_bad3.csv", std::ios::binary);
            out << text.substr(0, text.size() / 2);
        }
        CHECK_THROWS_AS(read_sinogram("sino_bad3.csv"), std::runtime_error);
    }

    SUBCASE("simulation rejects mismatched grids") {
        PhantomSpec other = disc_phantom(1.2 / 100);
        CHECK_THROWS_AS(simulate_sinogram(other, g), std::invalid_argument);
    }

    std::remove(p1.c_str());
    std::remove(p2.c_str());
}
