#pragma once

// Pinched spheres of revolution.
//
// A surface is generated by a profile rho(s) (distance to the axis as a
// function of meridian arc length) obeying rho' = -sqrt(g(rho^2)) with
// rho(0) = R, where the shaping function g on [0, R^2] controls the Gaussian
// curvature: K(s) = -g'(rho(s)^2).  The shape of g used here keeps K = 1 on a
// band around the equator, K = Kmax on a cap around the poles, and joins the
// two regimes by a convex C^2 blend, which forces the meridian length down
// toward pi*R as Kmax approaches 1/R^2.

#include <vector>

#include "flab/linalg.hpp"

namespace flab {

// Shaping function g: [0, R^2] -> [0, 1], strictly decreasing and convex,
// with g(0) = 1, g(R^2) = 0, slope -Kmax near 0 and slope -1 near R^2.
// Outside the blend window it coincides with the piecewise-linear function
// max(1 - Kmax*x, R^2 - x) whose corner sits at xstar.
struct PinchFunction {
    double R = 1;
    double Kmax = 1;
    double smoothing = 0;   // full width of the C^2 blend window
    double xstar = 0;       // corner of the piecewise-linear comparison function
    double halfwidth = 0;   // smoothing / 2
    bool degenerate_cap = false;  // round sphere: g(x) = 1 - x on [0, 1]

    double domain_end() const { return R * R; }
    double eval(double x) const;
    double deriv(double x) const;
    double second(double x) const;
};

// Validates the (R, Kmax, smoothing) triple and assembles the blend.
// Kmax <= 1/R^2 is rejected (the total-curvature budget cannot close the
// surface), except for the exact round case R = 1, Kmax = 1 which is accepted
// with degenerate_cap set.  The blend must fit strictly between the domain
// endpoints: smoothing/2 < min(xstar, R^2 - xstar).
PinchFunction build_pinch_function(double R, double Kmax, double smoothing);

// Numerical profile of the surface on the northern half-meridian [0, L],
// with the even/odd extensions to [-L, L] provided by the accessors.
// z(s) is the height of the meridian point above the equator plane, so the
// ambient embedding is (rho cos theta, rho sin theta, z).
class ProfileSurface {
  public:
    ProfileSurface(PinchFunction pinch, std::vector<double> s, std::vector<double> rho,
                   std::vector<double> z, double L, double tol);

    const PinchFunction& pinch() const { return pinch_; }
    double L() const { return L_; }
    double R() const { return pinch_.R; }
    double tol() const { return tol_; }

    double rho(double s) const;        // even in s
    double drho(double s) const;       // odd;  -sqrt(g(rho^2)) for s > 0
    double curvature(double s) const;  // K(s) = -g'(rho(s)^2)
    double z(double s) const;          // odd
    double dz(double s) const;         // even; sqrt(1 - g(rho^2))

    // Odd continuation through the poles (rho changes sign), valid for
    // |s| <= L + 0.05.  The continuation solves the same profile equation, so
    // adaptive integrators may evaluate trial stages slightly past a pole
    // without leaving the model; accepted geodesic samples are still confined
    // to |s| < L by the pole-margin logic.
    double rho_tolerant(double s) const;
    double drho_tolerant(double s) const;

    Vec3 embed(double s, double theta) const;
    Vec3 embed_velocity(double s, double theta, double sdot, double thetadot) const;

  private:
    double rho_half(double s) const;  // on [0, L] via monotone Hermite lookup
    double z_half(double s) const;

    PinchFunction pinch_;
    std::vector<double> s_, rho_, z_;
    double L_;
    double tol_;
};

// Integrates the profile ODE from the analytic equatorial branch
// rho = R cos s, detects the pole by the crossing rho = rho_floor, and
// extrapolates the endpoint using rho' -> -1.
ProfileSurface solve_profile(const PinchFunction& pinch, double tol = 1e-10);

inline double gaussian_curvature(const ProfileSurface& surf, double s) { return surf.curvature(s); }

struct MeridianBound {
    double two_L = 0;    // meridian length
    double bound = 0;    // b * pi * R
    double ratio = 0;    // 2L / (pi R)
    bool within = false; // 2L < b * pi * R
};

// Builds the surface for (R, Kmax) with an automatically fitted blend width
// and reports whether the full meridian is shorter than b * pi * R.
MeridianBound meridian_return_bound(double R, double Kmax, double b, double tol = 1e-10);

}  // namespace flab
