#pragma once

// Geodesic flows on the surface of revolution, Riemannian and Randers.
//
// The production path for Randers geodesics uses the navigation splitting:
// if gamma0 is a unit-speed h-geodesic with initial velocity v0 - X, then
// c(t) = (s0(t), theta0(t) + eta t) is the unit-speed Finsler geodesic with
// initial velocity v0.  A direct integration of the geodesic spray of F is
// kept alongside as an independent oracle for that shortcut.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "flab/linalg.hpp"
#include "flab/ode.hpp"
#include "flab/randers.hpp"

namespace flab {

struct GeodesicState {
    double t = 0;
    double s = 0;
    double theta = 0;
    double sdot = 0;
    double thetadot = 0;
    double clairaut = 0;  // rho^2 * thetadot of the underlying h-geodesic
};

// Sampled geodesic with cubic Hermite dense output.  State components are
// (s, theta, sdot, thetadot); theta lives on the universal cover (no wrapping).
// Near-meridian orbits continue through the poles (theta jumps by pi, sdot
// flips); all other orbits stop at the pole margin with pole_truncated set.
struct Trajectory {
    std::shared_ptr<const ProfileSurface> surface;
    double eta = 0;  // wind carried by the velocity samples (0 for h-geodesics)
    OdeResult<4> path;
    bool pole_touched = false;    // came within the pole margin
    bool pole_truncated = false;  // stopped there (non-meridian orbit)
    std::size_t pole_passes = 0;

    std::size_t size() const { return path.t.size(); }
    double t_end() const { return path.t.back(); }
    Vec4 state_at(double tq) const;
    Vec4 deriv_at(double tq) const;
    GeodesicState sample(std::size_t i) const;
    Vec3 ambient_at(double tq) const;
    double clairaut_at(double tq) const;
    double h_energy_at(double tq) const;  // sdot^2 + rho^2 (thetadot - eta)^2
};

struct GeodesicOptions {
    double tol = 1e-10;
    double dt_max = 5e-3;
    double pole_margin = 1e-3;
    double meridian_clairaut = 1e-9;  // |c| below which pole passage continues
    double horizon_cap = 200.0;
};

Trajectory integrate_h_geodesic(std::shared_ptr<const ProfileSurface> surface,
                                const GeodesicState& init, double T,
                                const GeodesicOptions& opt = {});

// Unit initial vectors only: F(v0) = 1 within 1e-8.
Trajectory integrate_finsler_geodesic(const RandersMetric& m, const TangentVector& v0, double T,
                                      const GeodesicOptions& opt = {});

// Independent verification path: integrates x'' = -2G(x, x') with the spray
// coefficients assembled from s-derivatives of the fundamental tensor.
Trajectory spray_oracle(const RandersMetric& m, const TangentVector& v0, double T,
                        const GeodesicOptions& opt = {});

// Spray coefficients G^i(x, y) and the connection coefficients
// Gamma^i_k = dG^i/dy^k (central differences).
Vec2 spray_coefficients(const RandersMetric& m, const TangentVector& v);
Mat2 spray_connection(const RandersMetric& m, const TangentVector& v);

// Covariant derivative along a trajectory of a field sampled on its grid:
// (DV/dt)^i = Vdot^i + Gamma^i_k V^k with the connection referenced to the
// trajectory velocity.  geodesic_certified records whether the input curve
// satisfies D(cdot)/dt = 0; the values carry no guarantee otherwise.
struct CovariantSeries {
    std::vector<Vec2> values;
    bool geodesic_certified = true;
};
CovariantSeries covariant_derivative(const RandersMetric& m, const Trajectory& traj,
                                     const std::vector<Vec2>& V);

// Solves DV/dt = 0 along the trajectory; returns V at every sample.
std::vector<Vec2> parallel_transport(const RandersMetric& m, const Trajectory& traj, Vec2 V0);

// g_v-unit vector g_v-orthogonal to v, oriented so that the frame
// (v, v_perp) is positive for the (d_theta, d_s) orientation of the surface.
TangentVector perp_vector(const RandersMetric& m, const TangentVector& v);

struct EquatorReturn {
    double T = 0;          // first return time
    double theta_adv = 0;  // lifted theta advance at the return
    GeodesicState at_return;
    Trajectory trajectory;
};

// Launches the unit vector at h-angle phi from the wind at (s, theta) = (0, 0)
// and returns at the first transverse downward crossing of the equator.
// phi = phi_max rides the meridian through the pole and returns as well.
EquatorReturn first_equator_return(const RandersMetric& m, double phi,
                                   const GeodesicOptions& opt = {});

}  // namespace flab
