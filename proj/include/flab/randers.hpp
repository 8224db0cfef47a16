#pragma once

// Randers metrics on a surface of revolution obtained from navigation data:
// the round metric h = ds^2 + rho^2 dtheta^2 of a ProfileSurface plus a
// rotational wind X = eta d_theta with |X|_h < 1.  The travel-time norm F
// solves |v - F(v) X|_h = F(v); expanding gives both the quadratic
// eps F^2 + 2 h(v,X) F - |v|_h^2 = 0, eps = 1 - |X|_h^2, and the closed form
// F = sqrt(a(v,v)) + b(v) with
//   a_ij = eps^-1 h_ij + eps^-2 X_i X_j,   b_k = -eps^-1 X_k.
// Both evaluation paths are exposed so each can check the other.

#include <memory>

#include "flab/linalg.hpp"
#include "flab/profile.hpp"

namespace flab {

// Tangent vector in the (d_s, d_theta) coordinate frame at (s, theta).
struct TangentVector {
    double s = 0;
    double theta = 0;
    double vs = 0;
    double vtheta = 0;
};

class RandersMetric {
  public:
    RandersMetric(std::shared_ptr<const ProfileSurface> surface, double eta);

    const ProfileSurface& surface() const { return *surface_; }
    const std::shared_ptr<const ProfileSurface>& surface_ptr() const { return surface_; }
    double eta() const { return eta_; }

    double wind_speed(double s) const;  // |X|_h = eta * rho(s)
    double epsilon(double s) const;     // 1 - |X|_h^2
    SymMat2 h_matrix(double s) const;   // diag(1, rho^2)
    SymMat2 a_matrix(double s) const;
    Vec2 b_form(double s) const;        // covector (b_s, b_theta)

    // (1 + eta R) / (1 - eta R), the sampled sup made exact
    double reversibility_closed_form() const;

  private:
    std::shared_ptr<const ProfileSurface> surface_;
    double eta_;
};

// Chooses eta so the metric has the requested reversibility:
// eta R = (r_target - 1) / (r_target + 1).
RandersMetric make_randers(std::shared_ptr<const ProfileSurface> surface, double r_target);
RandersMetric make_randers(ProfileSurface surface, double r_target);

// Travel-time norm via the (a, b) closed form; F(0) = 0 by continuity.
double finsler_norm(const RandersMetric& m, const TangentVector& v);

// Same value as the positive root of the navigation quadratic.
double finsler_norm_quadratic(const RandersMetric& m, const TangentVector& v);

// Half fiber-Hessian of F^2 at v by central differences (step scaled to |v|).
// Throws ConvexityError if the result is not positive definite.
SymMat2 fundamental_tensor(const RandersMetric& m, const TangentVector& v);

// Direct evaluation of the Randers fundamental tensor; used as the oracle for
// the finite-difference path.
SymMat2 fundamental_tensor_closed_form(const RandersMetric& m, const TangentVector& v);

struct ReversibilityReport {
    double value = 1;  // sup of F(-v) over F(v) = 1
    double s_at = 0;   // meridian coordinate of the maximizer
    double psi_at = 0; // angle of the maximizer on the F-unit circle, 0 = with the wind
};

ReversibilityReport reversibility_report(const RandersMetric& m);
double reversibility(const RandersMetric& m);

// Largest admissible h-angle to the wind at latitude s: the F-unit vector
// turning further than phi_max would point south.  Equals atan2(1, |X|_h).
double phi_max(const RandersMetric& m, double s);

// F-unit vector at (s, theta) making h-angle phi with the wind direction
// (the positive theta direction), phi in [0, phi_max].  For eta = 0 this is
// the h-unit vector at angle phi from d_theta.
TangentVector unit_vector_at_angle(const RandersMetric& m, double s, double theta, double phi);

}  // namespace flab
