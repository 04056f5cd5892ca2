#pragma once

#include "rtomo/forward.hpp"
#include "rtomo/phantom.hpp"

namespace rtomo {

// Slow reference versions of the forward pipeline, kept for testing and for
// the benchmark target. line_integral_dense walks one wide sample window
// instead of the two annulus windows; it must agree with line_integral to
// the last bit. simulate_sinogram_serial is a single-threaded row loop.
double line_integral_dense(double alpha, double s, const PhantomSpec& ph, double fine_step);

Sinogram simulate_sinogram_serial(const PhantomSpec& ph, const ScanGeometry& geom,
                                  const ForwardOptions& opts = {});

} // namespace rtomo
