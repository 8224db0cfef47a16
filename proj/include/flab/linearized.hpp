#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flab/geodesics.hpp"
#include "flab/ode.hpp"
#include "flab/randers.hpp"

namespace flab {

// Curvature along an orbit as a function of time.  Owns copies of what it
// samples, so it stays valid after the trajectory is gone.
using CurvatureTrack = std::function<double(double)>;

CurvatureTrack curvature_along(const Trajectory& traj);

// Scalar transverse linearization f'' = -K(t) f.
struct JacobiSolution {
    OdeResult<2> path;  // components (f, f')
    double f_at(double t) const { return path.at(t)[0]; }
    double fdot_at(double t) const { return path.at(t)[1]; }
};

JacobiSolution jacobi_scalar(const CurvatureTrack& K, double f0, double df0, double T);

// First positive zero of the solution; throws NumericsError if none before T_max.
double jacobi_first_zero(const CurvatureTrack& K, double f0, double df0, double T_max);

// Winding of the planar system u' = [[0, -K], [1, 0]] u started along w0,
// in revolutions over [0, T].  The angle obeys the closed scalar equation
// theta' = cos^2 + K sin^2, so the magnitude of u never enters.
struct RotationResult {
    double delta;     // (theta(T) - theta(0)) / 2 pi
    double min_rate;  // smallest observed theta'
};

RotationResult rotation_angle(const CurvatureTrack& K, Vec2 w0, double T);

// Index of a rotation interval [lo, hi] of width < 1/2: twice the integer the
// interval contains, else odd between the neighbouring even values.  Endpoints
// within `snap` of an integer are treated as meeting it.
int mu_hat(double lo, double hi, double snap = 1e-9);

struct RotationRecord {
    std::string orbit;
    double T = 0;
    double lo = 0, hi = 0;  // rotation interval over the fan of start directions
    int cz = 0;
    double min_rate = 0;
};

// Rotation interval over a fan of start directions plus the index.  The orbit
// must close up (positions and velocities) within 1e-6.
RotationRecord cz_index(const RandersMetric& m, const Trajectory& orbit,
                        const std::string& id = "", int fan = 64);

struct TaggedOrbit {
    Trajectory traj;
    bool contractible_lift = false;
    std::string id;
};

struct ConvexityEntry {
    std::string orbit;
    bool contractible_lift = false;
    RotationRecord rotation;
    double length = 0;
    double length_bound = 0;
    bool length_ok = false;
    bool rotation_exceeds_full_turn = false;
    bool convex_consistent = false;  // contractible lifts need index >= 3
};

std::vector<ConvexityEntry> dynamical_convexity_report(const RandersMetric& m,
                                                       const std::vector<TaggedOrbit>& orbits);

// Finite-difference check of the scalar linearization: the equator-launched
// family phi -> c_phi is differenced at step dphi and projected onto the
// transverse frame, then compared with the Jacobi prediction.
struct LinearizedCheck {
    double dphi = 0;
    double max_deviation = 0;      // sup gap, relative to the prediction scale
    double max_perp_residual = 0;  // sup |g(cdot, predicted field)|
};

LinearizedCheck linearized_flow_oracle(const RandersMetric& m, double phi, double T, double dphi);

}  // namespace flab
