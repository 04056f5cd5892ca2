#pragma once

#include <cmath>

#include "rtomo/boundary.hpp"

namespace rtomo {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

enum class PhantomMode { Full, ShellOnly };

// Disc of radius R with a radially perturbed edge. Full mode is the object
// itself (f_in inside, f_out outside); ShellOnly isolates the perturbation:
// the difference between the perturbed and the unperturbed object.
struct PhantomSpec {
    Vec2 center{0.1, 0.2};
    double radius = 0.3;
    double f_in = 1.0;
    double f_out = 0.0;
    PerturbationSpec perturbation;
    double eps = 1.2 / 500.0;
    PhantomMode mode = PhantomMode::Full;
};

// Geometry attached to a point of the unperturbed circle at polar angle
// base_angle; h0_local is the normalized perturbation there, in eps units.
struct LocalFrame {
    double base_angle = 0.0;
    Vec2 x0;
    Vec2 outward_unit;
    double h0_local = 0.0;
};

// Throws std::invalid_argument when a field violates the invariants
// (eps > 0, shell thin relative to the disc, nonzero contrast in ShellOnly).
void validate_phantom(const PhantomSpec& spec);

// Bound on |H0| over the profile arguments this phantom can produce.
double phantom_sup_h0(const PhantomSpec& spec);

double boundary_radius(double theta, const PhantomSpec& spec);

// Membership tester with the per-spec bounds hoisted out, for tight loops.
// Decisions are identical to the free functions below, which route through
// this class.
class ShellClassifier {
  public:
    explicit ShellClassifier(const PhantomSpec& spec);
    // True iff y lies in the perturbed disc (boundary points count as inside).
    bool inside(const Vec2& y) const;
    // Indicator difference chi_perturbed - chi_circle in {-1, 0, +1}.
    int sign(const Vec2& y) const;

  private:
    bool inside_at(double rho, double dx, double dy) const;
    const PhantomSpec& spec_;
    double cap_;   // eps * sup|H0|
    double slack_; // classification margin, 1e-9 * eps
};

bool inside_perturbed(const Vec2& y, const PhantomSpec& spec);
int shell_sign(const Vec2& y, const PhantomSpec& spec);

double eval_f(const Vec2& y, const PhantomSpec& spec);

LocalFrame local_frame(double base_angle, const PhantomSpec& spec);

} // namespace rtomo
