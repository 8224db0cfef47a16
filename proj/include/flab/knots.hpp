#pragma once

// Polyline knots on the unit 3-sphere and in the unit tangent bundle of the
// round 2-sphere.
//
// Linking numbers are computed by stereographic projection to R^3 followed by
// exact evaluation of the Gauss double integral over all segment pairs (each
// pair contributes the signed solid angle of its Gauss-map quadrilateral), so
// the raw sum is an integer up to rounding noise and the integrality residual
// is a genuine health check, not a discretization estimate.
//
// Conventions.  A point of S^3 is a unit quaternion stored as
// (Re z, Im z, Re w, Im w); left multiplication by i is times_i from linalg.
// A point (x, y, t) of S^2 sits inside the imaginary quaternions as
// t*i + x*j + y*k, i.e. as the pair (it, x + iy).  The ambient orientation is
// fixed once and for all so that two distinct fibers of the circle fibration
// link +1; with that choice the standard transverse unknot has self-linking
// number -1.  See kOrientationSign in knots.cpp.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "flab/errors.hpp"
#include "flab/linalg.hpp"

namespace flab {

// Closed oriented polyline on S^3.  Stored with the closure vertex duplicated
// (front() == back()).  `reversed` flips the traversal direction without
// touching storage.  Valid knots have unit vertices, no repeated consecutive
// vertices and chords shorter than 0.1; validate() throws ConfigError
// otherwise.
struct PolylineKnot {
    std::vector<Vec4> pts;
    bool reversed = false;

    std::size_t segments() const { return pts.empty() ? 0 : pts.size() - 1; }
    void validate() const;
    PolylineKnot reversed_copy() const;
};

// Samples curve(t), t in [0, 2pi], at n equal steps and closes the loop by
// duplicating the first vertex.  The result is validated.
PolylineKnot sampled_knot(const std::function<Vec4(double)>& curve, int n);

struct LinkResult {
    long value = 0;     // the linking number
    double residual = 0;  // |raw Gauss sum / 4pi - value|
    Vec4 pole{};        // stereographic pole that was used
};

// Linking number of two disjoint knots.  Throws ProximityError if the curves
// come closer than 1e-3 (chordal distance between segments), QuadratureError
// if the rounded sum misses an integer by 0.05 or more.  The projection pole
// is chosen automatically, as far from both curves as possible.
LinkResult gauss_link_detail(const PolylineKnot& a, const PolylineKnot& b);
long gauss_link(const PolylineKnot& a, const PolylineKnot& b);

// Same computation from a caller-supplied pole (used to test that the answer
// does not depend on the choice).  The pole must keep distance 0.05 from both
// curves.
LinkResult gauss_link_from_pole(const PolylineKnot& a, const PolylineKnot& b, const Vec4& pole);

// Quaternion product and conjugate in the (z, w) pair representation:
// (z1, w1)(z2, w2) = (z1 z2 - w1 conj(w2), z1 w2 + w1 conj(z2)).
Vec4 qmul(const Vec4& a, const Vec4& b);
Vec4 qconj(const Vec4& a);

// A point of the unit tangent bundle of the round S^2: a base point and a
// unit tangent vector orthogonal to it.
struct UnitTangentPoint {
    Vec3 base{};
    Vec3 tangent{};
};

// The 2-to-1 cover of the unit tangent bundle by S^3,
//   A |-> (A^-1 j A, -A^-1 k A),
// with j = (0,0,1,0) and k = (0,0,0,1) as quaternions.  Identifies antipodes:
// double_cover(-A) == double_cover(A).  Throws ContractError unless |A| is 1
// within 1e-10.
UnitTangentPoint double_cover(const Vec4& a);

// Continuous branch of the inverse of double_cover along a closed loop in the
// unit tangent bundle.  `seed` selects the starting branch (nearest preimage);
// without it the branch is fixed deterministically.  path has one entry per
// input vertex; closes reports whether the branch returns to its start (true)
// or to the antipode (false).  When it closes the final entry is snapped to
// the first.
struct LiftResult {
    std::vector<Vec4> path;
    bool closes = false;
};
LiftResult lift_loop(const std::vector<UnitTangentPoint>& loop, std::optional<Vec4> seed = {});

// Self-linking number of a knot transverse to the standard contact planes:
// the linking number with the push-off along `frame`, computed at push-off
// sizes 1e-2, 5e-3 and 2.5e-3.  Throws FramingError if the frame vanishes
// along the knot or the three answers disagree.  `frame` holds one vector per
// vertex (components along the knot direction are projected out).
long self_linking(const PolylineKnot& k, const std::vector<Vec4>& frame);

// The global contact framing j*x sampled along the knot, the standard choice
// for self_linking on S^3.
std::vector<Vec4> contact_frame(const PolylineKnot& k);

// Self-linking number of a closed transverse loop in the unit tangent bundle,
// computed upstairs through the double cover: if g is the lift of the loop
// and g_e the lift of its push-off (rotation of the tangent vector towards
// base x tangent), then sl = lk(g, g_e) + lk(g, -g_e).  The loop must lift to
// a closed curve (ContractError otherwise).
long self_linking_unit_tangent(const std::vector<UnitTangentPoint>& loop);

// Parity invariant of a closed curve on S^2 deciding whether its velocity
// lift to the unit tangent bundle is contractible there: the turning number
// in a stereographic chart avoiding the curve is well defined mod 2, and the
// lift is contractible iff it is even.  Simple great circles give false,
// doubly covered ones and figure-eight curves give true.
bool lift_contractibility_tag(const std::vector<Vec3>& curve);

// The standard figure-eight test family, sampled at n >= 256 points:
//   base(theta)  = 1/2 (1 + cos 2theta, sin 2theta, 2 sin theta)      on S^2,
//   lift         = (base, Gamma) with
//   Gamma(theta) = (-1/2 sin 2theta, 1/2 (cos 2theta - 1), cos theta),
//   sphere_lift(theta) = (1, e^{i theta}) / sqrt(2)                   on S^3.
// sphere_lift is the closed preimage of lift under double_cover.  The base
// curve crosses itself once at (1,0,0) (theta = 0 and pi); Gamma stays on the
// positive side of the velocity: g0(base', Gamma) = 1 for all theta.
struct FigureEightCurves {
    std::vector<Vec3> base;
    std::vector<UnitTangentPoint> lift;
    std::vector<Vec4> sphere_lift;
};
FigureEightCurves figure_eight_curves(int n);

}  // namespace flab
