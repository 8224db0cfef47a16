#pragma once

// Shooting for the figure-eight closed geodesic.
//
// Launch angles phi in (0, phi_max) at the equator give orbits that come back
// to the equator after a half period T_phi with a lifted theta advance
// theta_adv(phi).  The advance moves from above 2*pi (near-equator launches on
// a pinched metric with R < r/(r+1)) down to pi + 2*L*eta (meridian limit), so
// a root theta_adv(phi*) = 2*pi exists; the orbit for phi* closes up after two
// half periods by the reflection symmetry s -> -s and crosses itself exactly
// once, over the launch point.

#include <functional>
#include <optional>
#include <vector>

#include "flab/geodesics.hpp"

namespace flab {

// One row of the return sweep.
struct SweepRow {
    double phi = 0;
    double T = 0;          // first return time
    double theta_adv = 0;  // lifted theta advance at the return
};

// n angles in (0, phi0), log-clustered toward both endpoints, ascending.
// The closest points sit at relative distance rel_margin from either end;
// both endpoint limits are singular (Jacobi degeneration at 0, pole passage
// at phi0) and are reached by extrapolation only.
std::vector<double> default_phi_grid(double phi0, int n = 64, double rel_margin = 5e-3);

std::vector<SweepRow> sweep_returns(const RandersMetric& m, const std::vector<double>& phis);

// Polynomial (Neville) extrapolation of T and theta_adv to the open ends of
// the angle range, using the nearest `points` rows at each end.
struct EndpointLimits {
    double T_at_zero = 0;      // equator limit phi -> 0+
    double theta_at_zero = 0;
    double T_at_max = 0;       // meridian limit phi -> phi0-
    double theta_at_max = 0;
};
EndpointLimits extrapolate_endpoints(const std::vector<SweepRow>& sweep, double phi0, int points = 5);

// Root of theta_adv(phi) = 2*pi, refined from a sign change in the sweep to
// |theta_adv - 2*pi| < root_tol.  Throws BracketError when the sweep never
// crosses 2*pi (metric outside the constructive window).
double find_phi_star(const RandersMetric& m, const std::vector<SweepRow>& sweep, double root_tol = 1e-9);
double find_phi_star(const RandersMetric& m, double root_tol = 1e-9);

struct ClosedOrbit {
    Trajectory orbit;            // closed, parameterized on [0, 2*T_half]
    double T_half = 0;           // equator-to-equator time
    double theta_adv = 0;        // advance over the first half
    double closure_residual = 0; // position + velocity gap between the ends
};

// Integrates the half orbit for phi_star and assembles the full period from
// the reflection (s, theta) -> (-s, theta + theta_adv) of the first half.
// Throws NumericsError when the closure residual exceeds tol.
ClosedOrbit close_up_figure_eight(const RandersMetric& m, double phi_star, double tol = 1e-6);

enum class CrossingType { transverse, negative_tangency, positive_tangency, ambiguous };

struct IntersectionEvent {
    double t_a = 0;   // strand parameters, t_a < t_b after reduction mod period
    double t_b = 0;
    double gap = 0;   // ambient distance between the refined strand points
    double angle = 0; // angle between the strand velocities, in [0, pi]
    CrossingType type = CrossingType::transverse;
    Vec3 point{};     // midpoint of the refined pair
};

struct IntersectionOptions {
    int n_seeds = 2048;       // coarse segments per period
    double proximity = 1e-7;  // accept pairs whose refined gap is below this
    double angle_tol = 1e-3;  // velocity angle within this of 0 or pi is a tangency
    double param_sep = 0;     // min circular parameter separation; 0 = auto
};

using SpaceCurve = std::function<Vec3(double)>;

// Self-intersections of a closed curve in ambient 3-space: coarse segment
// proximity search over n_seeds segments, Gauss-Newton refinement of the
// squared distance in the two parameters, deduplication, classification by
// the velocity angle.  Tangencies closer than angle_tol are split by the
// sign of the velocity dot product; a pair that is neither clearly crossing
// nor clearly touching is kept as ambiguous rather than dropped.
std::vector<IntersectionEvent> count_self_intersections(const SpaceCurve& pos, const SpaceCurve& vel,
                                                        double period,
                                                        const IntersectionOptions& opt = {});
std::vector<IntersectionEvent> count_self_intersections(const Trajectory& curve,
                                                        const IntersectionOptions& opt = {});

struct ShootingReport {
    // metric descriptor
    double r = 1;          // requested reversibility
    double delta = 0;      // pinching target, must stay below kmin_scaled
    double R = 1;
    double Kmax = 1;
    double smoothing = 0;
    double eta = 0;

    std::vector<SweepRow> sweep;
    EndpointLimits limits;

    double phi_star = 0;
    double T_half = 0;
    double closure_residual = 0;
    Trajectory orbit;  // closed figure-eight on [0, 2*T_half]
    std::vector<IntersectionEvent> intersections;

    // curvature range of the dilated metric with sup K = 1 (scan over the
    // surface grid and the orbit trace)
    double kmin_scaled = 0;
    double kmax_scaled = 0;

    double length = 0;            // 2*T_half at unit speed
    double rademacher_bound = 0;  // 2*pi*(1 + 1/r)/sqrt(Kmax)
    double length_scaled = 0;     // length * sqrt(Kmax)
    double reversibility = 1;     // sampled sup F(-v)/F(v)
};

// End-to-end pinched figure-eight experiment for reversibility r and pinch
// target delta < (r/(r+1))^2.  Picks (R, Kmax) inside the constructive
// window (margins 1e-2, shrunk if delta sits close to the window edge),
// shoots the figure-eight, and checks every claim: curvature range in
// (delta, 1] after dilation, closure below 1e-6, exactly one transverse
// self-intersection and none before the first equator hit, length at least
// the bound, reversibility within 1e-6 of r.  Explicit R/Kmax overrides are
// validated against the same window.  Any failed stage throws with the
// stage named.
ShootingReport verify_pinched_figure_eight(double r, double delta,
                                           std::optional<double> R_override = {},
                                           std::optional<double> Kmax_override = {});

}  // namespace flab
