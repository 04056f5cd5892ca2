#pragma once

#include <functional>

#include "rtomo/tabulated.hpp"

namespace rtomo {

// Cardinal B-spline of degree n, supported on [0, n+1], by the Cox-de Boor
// recursion over integer knots.
double bspline_eval(int degree, double t);

// Cubic convolution interpolation kernel ik(t) = 3*B3(t+2) - (B2(t+2) + B2(t+1)),
// supported on [-2,2], C^1, interpolating (ik(0)=1, ik(j)=0 at other integers),
// exact on constants and linears.
double keys_eval(double t);

// Detector aperture w(t) = (35/32)(1-t^2)^3 on [-1,1]; C^2, unit mass, even.
double aperture_eval(double t);

// Lambda(t) = (1/pi) p.v. Int ik'(s)/(t-s) ds, in closed form.  Piecewise
// quadratic ik' gives log terms with finite limits at the breakpoints
// {-2,-1,0,1,2}; at an exact breakpoint the (vanishing) log term is dropped.
// For |t| >= 8 a convergent Laurent expansion avoids the catastrophic
// cancellation of the log form; the leading tail is -1/(pi t^2).
double lambda_kernel(double t);

// Radon transform of a radial profile: Int profile(sqrt(t^2 + u^2)) du.
// half_support bounds the radius beyond which the profile vanishes.
double radon_of_radial(const std::function<double(double)>& profile, double t,
                       double half_support);

// Shared evaluators and tables for one process.  Tables use step 1/512
// (the smoothed-kernel family is C^2 or better, so cubic interpolation
// keeps errors near 1e-10).
class KernelSet {
  public:
    static const KernelSet& instance();

    double keys(double t) const { return keys_eval(t); }
    double aperture(double t) const { return aperture_eval(t); }
    double lambda(double t) const { return lambda_kernel(t); }

    // (ik * w)(y), supported on [-3,3].
    double ik_conv_w(double y) const { return ik_conv_w_(y); }

    // Edge response E(h) = Int_{-inf}^h (ik * w); 0 below -3, 1 above 3.
    double edge_response(double h) const;

    // Band response (ik * w * chi_H)(h) = E(h) - E(h-H), both signs of H.
    double band_response(double h, double H) const {
        return edge_response(h) - edge_response(h - H);
    }

    // K(rho) = (1/2pi) Int_0^pi (Lambda * w)(rho cos u) du, by quadrature.
    // Valid for any rho >= 0 (used up to ~5.2); vanishes for rho > 3.
    double kernel_K(double rho) const;

    // Table-backed K with the rho >= 3 value pinned to zero.
    double k_radial(double rho) const {
        if (rho >= 3.0) return 0.0;
        return k_radial_(rho);
    }

    const TabulatedFunction& ik_conv_w_table() const { return ik_conv_w_; }
    const TabulatedFunction& edge_table() const { return edge_; }
    const TabulatedFunction& k_radial_table() const { return k_radial_; }

    // (Lambda * w)(y); tabulated on [-5.4, 5.4], -1/(pi y^2) tail outside.
    double lambda_conv_w(double y) const { return lambda_conv_w_(y); }

  private:
    KernelSet();
    TabulatedFunction ik_conv_w_;
    TabulatedFunction edge_;
    TabulatedFunction k_radial_;
    TabulatedFunction lambda_conv_w_;
};

} // namespace rtomo
