#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rtomo/forward.hpp"
#include "rtomo/phantom.hpp"
#include "rtomo/recon.hpp"
#include "rtomo/reference.hpp"

using namespace rtomo;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* label, double serial_s, double parallel_s) {
    std::printf("%-24s %10.3fs %10.3fs %8.2fx\n", label, serial_s, parallel_s,
                serial_s / parallel_s);
}

} // namespace

int main(int argc, char** argv) {
    int n_p = 251;
    if (argc > 1) n_p = std::atoi(argv[1]);

    const ScanGeometry geom = ScanGeometry::make(n_p);
    PhantomSpec ph;
    ph.eps = geom.eps;
    ph.perturbation = PerturbationSpec::sinusoid();

#ifdef _OPENMP
    std::printf("n_p=%d, omp threads=%d\n\n", n_p, omp_get_max_threads());
#else
    std::printf("n_p=%d, no OpenMP\n\n", n_p);
#endif
    std::printf("%-24s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    Clock::time_point t0 = Clock::now();
    const Sinogram ref = simulate_sinogram_serial(ph, geom);
    const double sim_serial = seconds_since(t0);

    t0 = Clock::now();
    const Sinogram sino = simulate_sinogram(ph, geom);
    const double sim_parallel = seconds_since(t0);
    report("simulate_sinogram", sim_serial, sim_parallel);

    double worst = 0.0;
    for (size_t i = 0; i < sino.values.size(); ++i)
        worst = std::max(worst, std::fabs(sino.values[i] - ref.values[i]));
    if (worst != 0.0) {
        std::printf("serial/parallel sinograms differ by %g\n", worst);
        return 1;
    }

    const double half = 52.0 * geom.eps;
    const Region roi{-half, half, -half, half};
    const FilteredProjections fp = filter_projections(sino, roi);
    const Vec2 origin{-50.0 * geom.eps, -50.0 * geom.eps};

    t0 = Clock::now();
    const ImageGrid img_serial = reconstruct_grid_serial(origin, geom.eps, 101, 101, fp);
    const double rec_serial = seconds_since(t0);

    t0 = Clock::now();
    const ImageGrid img = reconstruct_grid(origin, geom.eps, 101, 101, fp);
    const double rec_parallel = seconds_since(t0);
    report("reconstruct_grid", rec_serial, rec_parallel);

    worst = 0.0;
    for (size_t i = 0; i < img.values.size(); ++i)
        worst = std::max(worst, std::fabs(img.values[i] - img_serial.values[i]));
    if (worst != 0.0) {
        std::printf("serial/parallel images differ by %g\n", worst);
        return 1;
    }
    std::printf("\nserial and parallel outputs are bitwise identical\n");
    return 0;
}
