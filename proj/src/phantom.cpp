#include "rtomo/phantom.hpp"

#include <stdexcept>

namespace rtomo {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

// Early-exit classification for the lacunary sine series. Partial sums are
// continued with h0_resume so the final comparison, when reached, is bit
// for bit the same as rho <= R + h_eps(theta). The tail bound plus margin
// makes every early answer agree with that final comparison.
bool inside_wsine(double rho, double s, const PhantomSpec& spec) {
    const PerturbationSpec& p = spec.perturbation;
    const double r = spec.radius, eps = spec.eps;
    double acc = 0.0;
    int from = p.start;
    for (int cut : {2, 5, 12}) {
        if (cut >= p.n_max || cut < from) continue;
        acc = h0_resume(s, p, from, cut, acc);
        from = cut + 1;
        const double tb = h0_tail_bound(p, cut) + 1e-12;
        if (rho > r + eps * (acc + tb)) return false;
        if (rho <= r + eps * (acc - tb)) return true;
    }
    acc = h0_resume(s, p, from, p.n_max, acc);
    return rho <= r + eps * acc;
}
} // namespace

void validate_phantom(const PhantomSpec& spec) {
    if (!(spec.eps > 0.0)) throw std::invalid_argument("phantom: eps must be positive");
    if (!(spec.radius > 0.0)) throw std::invalid_argument("phantom: radius must be positive");
    const double sup = phantom_sup_h0(spec);
    if (!(spec.radius > 3.0 * spec.eps * (1.0 + sup)))
        throw std::invalid_argument("phantom: shell too thick for the disc radius");
    if (spec.mode == PhantomMode::ShellOnly && spec.f_in == spec.f_out)
        throw std::invalid_argument("phantom: ShellOnly needs f_in != f_out");
}

double phantom_sup_h0(const PhantomSpec& spec) {
    return sup_h0_bound(spec.perturbation, 2.0 * kPi / std::sqrt(spec.eps));
}

double boundary_radius(double theta, const PhantomSpec& spec) {
    return spec.radius + h_eps(theta, spec.perturbation, spec.eps);
}

ShellClassifier::ShellClassifier(const PhantomSpec& spec)
    : spec_(spec), cap_(spec.eps * phantom_sup_h0(spec)), slack_(1e-9 * spec.eps) {}

bool ShellClassifier::inside_at(double rho, double dx, double dy) const {
    const PerturbationSpec& p = spec_.perturbation;
    if (p.kind == PerturbationKind::Zero) return rho <= spec_.radius;
    if (p.kind == PerturbationKind::Constant)
        return rho <= spec_.radius + spec_.eps * p.constant_h;
    if (rho > spec_.radius + cap_ + slack_) return false;
    if (rho < spec_.radius - cap_ - slack_) return true;
    const double th = std::remainder(std::atan2(dy, dx), 2.0 * kPi);
    if (p.kind == PerturbationKind::WeierstrassSine)
        return inside_wsine(rho, th / std::sqrt(spec_.eps), spec_);
    return rho <= spec_.radius + h_eps(th, p, spec_.eps);
}

bool ShellClassifier::inside(const Vec2& y) const {
    const double dx = y.x - spec_.center.x, dy = y.y - spec_.center.y;
    return inside_at(std::sqrt(dx * dx + dy * dy), dx, dy);
}

int ShellClassifier::sign(const Vec2& y) const {
    const double dx = y.x - spec_.center.x, dy = y.y - spec_.center.y;
    const double rho = std::sqrt(dx * dx + dy * dy);
    if (std::abs(rho - spec_.radius) > cap_ + slack_) return 0;
    const bool in_pert = inside_at(rho, dx, dy);
    const bool in_circle = rho <= spec_.radius;
    return int(in_pert) - int(in_circle);
}

bool inside_perturbed(const Vec2& y, const PhantomSpec& spec) {
    return ShellClassifier(spec).inside(y);
}

int shell_sign(const Vec2& y, const PhantomSpec& spec) {
    return ShellClassifier(spec).sign(y);
}

double eval_f(const Vec2& y, const PhantomSpec& spec) {
    if (spec.mode == PhantomMode::Full)
        return inside_perturbed(y, spec) ? spec.f_in : spec.f_out;
    const int s = shell_sign(y, spec);
    if (s > 0) return spec.f_in - spec.f_out;
    if (s < 0) return spec.f_out - spec.f_in;
    return 0.0;
}

LocalFrame local_frame(double base_angle, const PhantomSpec& spec) {
    LocalFrame fr;
    fr.base_angle = base_angle;
    fr.outward_unit = {std::cos(base_angle), std::sin(base_angle)};
    fr.x0 = spec.center + spec.radius * fr.outward_unit;
    fr.h0_local = h0_normalized(base_angle, spec.perturbation, spec.eps);
    return fr;
}

} // namespace rtomo
