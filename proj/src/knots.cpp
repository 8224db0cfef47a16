#include "flab/knots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace flab {

namespace {

// Global sign of the Gauss integral, fixed once by the calibration pair
// lk(fiber, fiber) = +1 / sl(standard transverse unknot) = -1 and frozen.
// With the frame construction below (cross4 completing a positively oriented
// basis) the raw sum already lands on that convention, so the factor is +1.
constexpr double kOrientationSign = 1.0;

constexpr double kMaxChord = 0.1;
constexpr double kMinCurveGap = 1e-3;
constexpr double kMinPoleGap = 0.05;
constexpr double kMaxResidual = 0.05;

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// det of the 4x4 matrix with rows a, b, c, d, and the generalized cross
// product defined by <d, cross4(a,b,c)> = det4(a,b,c,d).
double det4(const Vec4& a, const Vec4& b, const Vec4& c, const Vec4& d) {
    auto drop = [](const Vec4& v, int col) -> Vec3 {
        Vec3 r{};
        int k = 0;
        for (int i = 0; i < 4; ++i)
            if (i != col) r[k++] = v[i];
        return r;
    };
    double s = 0;
    double sign = -1;  // (-1)^(4+i), i = 1-based column index
    for (int col = 0; col < 4; ++col) {
        s += sign * d[col] * det3(drop(a, col), drop(b, col), drop(c, col));
        sign = -sign;
    }
    return s;
}

Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
    Vec4 r{};
    for (int col = 0; col < 4; ++col) {
        Vec4 e{};
        e[col] = 1;
        r[col] = det4(a, b, c, e);
    }
    return r;
}

// Closest chordal distance between segments [p0,p1] and [q0,q1] in R^4
// (clamped closest-approach of the two parameter intervals).
double segment_gap4(const Vec4& p0, const Vec4& p1, const Vec4& q0, const Vec4& q1) {
    Vec4 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
    double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
    double s = 0, t = 0;
    if (a > 0) {
        double c = dot(d1, r);
        if (e > 0) {
            double b = dot(d1, d2);
            double den = a * e - b * b;
            s = den > 0 ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
            t = std::clamp((b * s + f) / e, 0.0, 1.0);
            s = std::clamp((b * t - c) / a, 0.0, 1.0);
        } else {
            s = std::clamp(-c / a, 0.0, 1.0);
        }
    } else if (e > 0) {
        t = std::clamp(f / e, 0.0, 1.0);
    }
    return norm((p0 + s * d1) - (q0 + t * d2));
}

double min_gap(const PolylineKnot& a, const PolylineKnot& b) {
    double g = 1e300;
    for (std::size_t i = 0; i + 1 < a.pts.size(); ++i)
        for (std::size_t j = 0; j + 1 < b.pts.size(); ++j)
            g = std::min(g, segment_gap4(a.pts[i], a.pts[i + 1], b.pts[j], b.pts[j + 1]));
    return g;
}

double min_vertex_dist_to(const PolylineKnot& k, const Vec4& p) {
    double g = 1e300;
    for (const Vec4& x : k.pts) g = std::min(g, norm(x - p));
    return g;
}

// Deterministic pole candidates: coordinate axes, half-diagonals, then a
// fixed pseudo-random batch (LCG + Box-Muller, no library distributions so
// the sequence is platform independent).
std::vector<Vec4> pole_candidates() {
    std::vector<Vec4> out;
    for (int i = 0; i < 4; ++i) {
        Vec4 e{};
        e[i] = 1;
        out.push_back(e);
        out.push_back(-e);
    }
    for (int mask = 0; mask < 16; ++mask) {
        Vec4 v;
        for (int i = 0; i < 4; ++i) v[i] = (mask >> i) & 1 ? -0.5 : 0.5;
        out.push_back(v);
    }
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return double(state >> 11) * 0x1p-53;
    };
    for (int i = 0; i < 32; ++i) {
        Vec4 v;
        for (int j = 0; j < 4; j += 2) {
            double u1 = std::max(next(), 1e-12), u2 = next();
            double r = std::sqrt(-2 * std::log(u1));
            v[j] = r * std::cos(2 * M_PI * u2);
            v[j + 1] = r * std::sin(2 * M_PI * u2);
        }
        out.push_back(normalized(v));
    }
    return out;
}

// Signed solid angle of the spherical triangle with unit vertices u, v, w.
double tri_solid_angle(const Vec3& u, const Vec3& v, const Vec3& w) {
    return 2 * std::atan2(det3(u, v, w), 1 + dot(u, v) + dot(v, w) + dot(w, u));
}

double pairwise_sum(std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return v[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

// Exact Gauss sum for two closed polylines in R^3: each segment pair
// contributes the signed solid angle of its Gauss-map quadrilateral, summed
// by a pairwise tree so the result is reproducible.
double polyline_link_raw(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    std::vector<double> rows;
    rows.reserve(a.size());
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        double row = 0;
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            Vec3 n00 = normalized(a[i] - b[j]);
            Vec3 n10 = normalized(a[i + 1] - b[j]);
            Vec3 n11 = normalized(a[i + 1] - b[j + 1]);
            Vec3 n01 = normalized(a[i] - b[j + 1]);
            row += tri_solid_angle(n00, n10, n11) + tri_solid_angle(n00, n11, n01);
        }
        rows.push_back(row);
    }
    return pairwise_sum(rows, 0, rows.size()) / (4 * M_PI);
}

// Stereographic image of a knot from pole p, in an orthonormal frame
// (q1, q2, q3) completing p to a positively oriented basis of R^4.  The frame
// is built deterministically from p alone so two calls with the same pole
// project identically.
std::vector<Vec3> project_from(const PolylineKnot& k, const Vec4& p) {
    int smallest = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(p[i]) < std::abs(p[smallest])) smallest = i;
    Vec4 q1{};
    q1[smallest] = 1;
    q1 = normalized(q1 - dot(q1, p) * p);
    int next = smallest == 0 ? 1 : 0;
    for (int i = 0; i < 4; ++i)
        if (i != smallest && std::abs(p[i]) < std::abs(p[next])) next = i;
    Vec4 q2{};
    q2[next] = 1;
    q2 = normalized(q2 - dot(q2, p) * p - dot(q2, q1) * q1);
    Vec4 q3 = normalized(cross4(p, q1, q2));  // det4(p,q1,q2,q3) = |cross4| > 0

    std::vector<Vec3> out;
    out.reserve(k.pts.size());
    for (const Vec4& x : k.pts) {
        double denom = 1 - dot(x, p);
        out.push_back({dot(x, q1) / denom, dot(x, q2) / denom, dot(x, q3) / denom});
    }
    if (k.reversed) std::reverse(out.begin(), out.end());
    return out;
}

LinkResult link_with_pole(const PolylineKnot& a, const PolylineKnot& b, const Vec4& pole) {
    double raw = kOrientationSign * polyline_link_raw(project_from(a, pole), project_from(b, pole));
    LinkResult res;
    res.value = std::llround(raw);
    res.residual = std::abs(raw - double(res.value));
    res.pole = pole;
    if (res.residual >= kMaxResidual)
        throw QuadratureError("gauss_link: residual " + fmt("%.3g", res.residual) +
                              " is not integral; refine both knots to at least twice as many segments");
    return res;
}

// Inverse of the identification (x, y, t) on S^2 <-> quaternion
// t*i + x*j + y*k = (it, x + iy).
Vec3 from_su2(const Vec4& q) {
    if (std::abs(q[0]) > 1e-9)
        throw ContractError("double_cover: image is not an imaginary quaternion");
    return {q[2], q[3], q[1]};
}

constexpr Vec4 kQuatJ{0, 0, 1, 0};
constexpr Vec4 kQuatK{0, 0, 0, 1};

// Unit quaternion Q whose conjugation u -> Q u conj(Q) realizes the rotation
// with columns (col_i, col_j, col_k) in the imaginary basis (i, j, k).
// Shepperd's branch selection keeps the divisor away from zero.
Vec4 rotation_to_quaternion(const Vec3& ci, const Vec3& cj, const Vec3& ck) {
    double m[3][3] = {{ci[0], cj[0], ck[0]}, {ci[1], cj[1], ck[1]}, {ci[2], cj[2], ck[2]}};
    double tr = m[0][0] + m[1][1] + m[2][2];
    double q0, q1, q2, q3;
    if (tr > m[0][0] && tr > m[1][1] && tr > m[2][2]) {
        double s = std::sqrt(tr + 1.0) * 2;
        q0 = 0.25 * s;
        q1 = (m[2][1] - m[1][2]) / s;
        q2 = (m[0][2] - m[2][0]) / s;
        q3 = (m[1][0] - m[0][1]) / s;
    } else if (m[0][0] > m[1][1] && m[0][0] > m[2][2]) {
        double s = std::sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2;
        q0 = (m[2][1] - m[1][2]) / s;
        q1 = 0.25 * s;
        q2 = (m[0][1] + m[1][0]) / s;
        q3 = (m[0][2] + m[2][0]) / s;
    } else if (m[1][1] > m[2][2]) {
        double s = std::sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2;
        q0 = (m[0][2] - m[2][0]) / s;
        q1 = (m[0][1] + m[1][0]) / s;
        q2 = 0.25 * s;
        q3 = (m[1][2] + m[2][1]) / s;
    } else {
        double s = std::sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2;
        q0 = (m[1][0] - m[0][1]) / s;
        q1 = (m[0][2] + m[2][0]) / s;
        q2 = (m[1][2] + m[2][1]) / s;
        q3 = 0.25 * s;
    }
    return normalized(Vec4{q0, q1, q2, q3});
}

void validate_unit_tangent_loop(const std::vector<UnitTangentPoint>& loop) {
    if (loop.size() < 4) throw ConfigError("unit tangent loop: need at least 3 segments");
    const UnitTangentPoint& f = loop.front();
    const UnitTangentPoint& l = loop.back();
    if (norm(f.base - l.base) > 1e-9 || norm(f.tangent - l.tangent) > 1e-9)
        throw ConfigError("unit tangent loop: not closed (first vertex must repeat at the end)");
    for (std::size_t i = 0; i < loop.size(); ++i) {
        if (std::abs(norm(loop[i].base) - 1) > 1e-9 || std::abs(norm(loop[i].tangent) - 1) > 1e-9 ||
            std::abs(dot(loop[i].base, loop[i].tangent)) > 1e-9)
            throw ConfigError("unit tangent loop: vertex " + std::to_string(i) +
                              " is not an orthonormal (base, tangent) pair");
        if (i + 1 < loop.size()) {
            double step = std::max(norm(loop[i + 1].base - loop[i].base),
                                   norm(loop[i + 1].tangent - loop[i].tangent));
            if (step >= kMaxChord)
                throw ConfigError("unit tangent loop: step " + std::to_string(i) + " too long");
        }
    }
}

// One branch of the preimage of a unit tangent point, the one closest to
// `near`.  The rotation taking (j, k) to (base, -tangent) in the imaginary
// quaternion picture is conjugation by A^-1; Shepperd recovers it up to sign.
Vec4 invert_double_cover(const UnitTangentPoint& p, const Vec4& near) {
    Vec3 b{p.base[2], p.base[0], p.base[1]};     // (i, j, k) components
    Vec3 w{p.tangent[2], p.tangent[0], p.tangent[1]};
    b = normalized(b);
    w = normalized(w - dot(w, b) * b);
    Vec3 ci = cross(b, -1.0 * w);
    Vec4 q = rotation_to_quaternion(ci, b, -1.0 * w);
    Vec4 a = qconj(q);  // conjugation was by A^-1
    if (dot(a, near) < 0) a = -a;
    UnitTangentPoint back = double_cover(a);
    double err = std::max(norm(back.base - p.base), norm(back.tangent - p.tangent));
    if (err > 1e-8)
        throw ContractError("lift_loop: round trip through the double cover off by " + fmt("%.3g", err));
    return a;
}

PolylineKnot knot_from_path(std::vector<Vec4> path) {
    PolylineKnot k;
    k.pts = std::move(path);
    k.validate();
    return k;
}

std::vector<UnitTangentPoint> rotate_tangents(const std::vector<UnitTangentPoint>& loop, double eps) {
    std::vector<UnitTangentPoint> out;
    out.reserve(loop.size());
    for (const UnitTangentPoint& p : loop) {
        Vec3 perp = cross(p.base, p.tangent);  // {tangent, perp} positively oriented
        out.push_back({p.base, std::cos(eps) * p.tangent + std::sin(eps) * perp});
    }
    return out;
}

}  // namespace

void PolylineKnot::validate() const {
    if (pts.size() < 4) throw ConfigError("PolylineKnot: need at least 3 segments");
    if (norm(pts.front() - pts.back()) > 1e-9)
        throw ConfigError("PolylineKnot: not closed (first vertex must repeat at the end)");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (std::abs(norm(pts[i]) - 1) > 1e-9)
            throw ConfigError("PolylineKnot: vertex " + std::to_string(i) + " is not a unit vector");
        if (i + 1 < pts.size()) {
            double chord = norm(pts[i + 1] - pts[i]);
            if (chord < 1e-12)
                throw ConfigError("PolylineKnot: repeated vertex at " + std::to_string(i));
            if (chord >= kMaxChord)
                throw ConfigError("PolylineKnot: chord " + std::to_string(i) + " has length " +
                                  fmt("%.3g", chord) + " >= 0.1; sample more densely");
        }
    }
}

PolylineKnot PolylineKnot::reversed_copy() const { return {pts, !reversed}; }

PolylineKnot sampled_knot(const std::function<Vec4(double)>& curve, int n) {
    if (n < 3) throw ConfigError("sampled_knot: need at least 3 samples");
    PolylineKnot k;
    k.pts.reserve(std::size_t(n) + 1);
    for (int i = 0; i < n; ++i) k.pts.push_back(curve(2 * M_PI * i / n));
    k.pts.push_back(k.pts.front());
    k.validate();
    return k;
}

LinkResult gauss_link_detail(const PolylineKnot& a, const PolylineKnot& b) {
    a.validate();
    b.validate();
    double gap = min_gap(a, b);
    if (gap <= kMinCurveGap)
        throw ProximityError("gauss_link: curves come within " + fmt("%.3g", gap) +
                             " of each other (need > 1e-3)");
    Vec4 best{};
    double best_score = -1;
    for (const Vec4& p : pole_candidates()) {
        double score = std::min(min_vertex_dist_to(a, p), min_vertex_dist_to(b, p));
        if (score > best_score) {
            best_score = score;
            best = p;
        }
    }
    if (best_score < kMinPoleGap)
        throw NumericsError("gauss_link: no admissible projection pole found");
    return link_with_pole(a, b, best);
}

long gauss_link(const PolylineKnot& a, const PolylineKnot& b) { return gauss_link_detail(a, b).value; }

LinkResult gauss_link_from_pole(const PolylineKnot& a, const PolylineKnot& b, const Vec4& pole) {
    a.validate();
    b.validate();
    if (std::abs(norm(pole) - 1) > 1e-9) throw ConfigError("gauss_link_from_pole: pole must be unit");
    double gap = min_gap(a, b);
    if (gap <= kMinCurveGap)
        throw ProximityError("gauss_link: curves come within " + fmt("%.3g", gap) +
                             " of each other (need > 1e-3)");
    if (std::min(min_vertex_dist_to(a, pole), min_vertex_dist_to(b, pole)) < kMinPoleGap)
        throw ConfigError("gauss_link_from_pole: pole too close to the curves");
    return link_with_pole(a, b, pole);
}

Vec4 qmul(const Vec4& a, const Vec4& b) {
    auto z1 = zpart(a), w1 = wpart(a), z2 = zpart(b), w2 = wpart(b);
    return from_zw(z1 * z2 - w1 * std::conj(w2), z1 * w2 + w1 * std::conj(z2));
}

Vec4 qconj(const Vec4& a) { return {a[0], -a[1], -a[2], -a[3]}; }

UnitTangentPoint double_cover(const Vec4& a) {
    if (std::abs(norm(a) - 1) > 1e-10) throw ContractError("double_cover: input is not a unit quaternion");
    Vec4 ainv = qconj(a);
    Vec4 base = qmul(qmul(ainv, kQuatJ), a);
    Vec4 tang = -qmul(qmul(ainv, kQuatK), a);
    return {from_su2(base), from_su2(tang)};
}

LiftResult lift_loop(const std::vector<UnitTangentPoint>& loop, std::optional<Vec4> seed) {
    validate_unit_tangent_loop(loop);
    Vec4 ref;
    if (seed) {
        ref = normalized(*seed);
    } else {
        // deterministic branch: largest component of the unseeded preimage positive
        Vec4 a0 = invert_double_cover(loop.front(), Vec4{1, 0, 0, 0});
        int big = 0;
        for (int i = 1; i < 4; ++i)
            if (std::abs(a0[i]) > std::abs(a0[big])) big = i;
        ref = a0[big] >= 0 ? a0 : -a0;
    }
    LiftResult res;
    res.path.reserve(loop.size());
    res.path.push_back(invert_double_cover(loop.front(), ref));
    for (std::size_t i = 1; i < loop.size(); ++i) {
        Vec4 prev = res.path.back();
        Vec4 a = invert_double_cover(loop[i], prev);
        if (std::abs(dot(a, prev)) < 0.9)
            throw ContractError("lift_loop: branch tracking lost at vertex " + std::to_string(i) +
                                "; sample the loop more densely");
        res.path.push_back(a);
    }
    double d_same = norm(res.path.back() - res.path.front());
    double d_anti = norm(res.path.back() + res.path.front());
    if (std::min(d_same, d_anti) > 1e-6)
        throw ContractError("lift_loop: endpoint matches neither branch of the start");
    res.closes = d_same < d_anti;
    if (res.closes) res.path.back() = res.path.front();
    return res;
}

std::vector<Vec4> contact_frame(const PolylineKnot& k) {
    std::vector<Vec4> f;
    f.reserve(k.pts.size());
    for (const Vec4& x : k.pts) f.push_back(qmul(kQuatJ, x));
    return f;
}

long self_linking(const PolylineKnot& k, const std::vector<Vec4>& frame) {
    k.validate();
    if (frame.size() != k.pts.size())
        throw ConfigError("self_linking: frame must hold one vector per knot vertex");
    if (norm(frame.front() - frame.back()) > 1e-9)
        throw ConfigError("self_linking: frame is not closed");
    std::vector<Vec4> unit;
    unit.reserve(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        Vec4 f = frame[i] - dot(frame[i], k.pts[i]) * k.pts[i];
        double n = norm(f);
        if (n < 1e-6)
            throw FramingError("self_linking: frame vanishes at vertex " + std::to_string(i));
        unit.push_back((1.0 / n) * f);
    }
    long values[3];
    const double eps[3] = {1e-2, 5e-3, 2.5e-3};
    for (int e = 0; e < 3; ++e) {
        PolylineKnot push;
        push.reversed = k.reversed;
        push.pts.reserve(k.pts.size());
        for (std::size_t i = 0; i < k.pts.size(); ++i)
            push.pts.push_back(normalized(k.pts[i] + eps[e] * unit[i]));
        push.pts.back() = push.pts.front();
        values[e] = gauss_link(k, push);
    }
    if (values[0] != values[1] || values[1] != values[2])
        throw FramingError("self_linking: answer drifts with the push-off size (" +
                           std::to_string(values[0]) + ", " + std::to_string(values[1]) + ", " +
                           std::to_string(values[2]) + ")");
    return values[0];
}

long self_linking_unit_tangent(const std::vector<UnitTangentPoint>& loop) {
    LiftResult base = lift_loop(loop);
    if (!base.closes)
        throw ContractError("self_linking_unit_tangent: loop is non-contractible, it has no closed lift");
    PolylineKnot gamma = knot_from_path(base.path);
    long values[3];
    // one step coarser than the S^3 ladder: the cover halves distances, and
    // the smallest push-off must stay clear of the proximity floor upstairs
    const double eps[3] = {2e-2, 1e-2, 5e-3};
    for (int e = 0; e < 3; ++e) {
        LiftResult pushed = lift_loop(rotate_tangents(loop, eps[e]), base.path.front());
        if (!pushed.closes)
            throw ContractError("self_linking_unit_tangent: push-off fails to lift closed");
        PolylineKnot near = knot_from_path(pushed.path);
        PolylineKnot anti = near;
        for (Vec4& x : anti.pts) x = -x;
        values[e] = gauss_link(gamma, near) + gauss_link(gamma, anti);
    }
    if (values[0] != values[1] || values[1] != values[2])
        throw FramingError("self_linking_unit_tangent: answer drifts with the push-off size (" +
                           std::to_string(values[0]) + ", " + std::to_string(values[1]) + ", " +
                           std::to_string(values[2]) + ")");
    return values[0];
}

bool lift_contractibility_tag(const std::vector<Vec3>& curve) {
    if (curve.size() < 4) throw ConfigError("lift_contractibility_tag: need at least 3 segments");
    if (norm(curve.front() - curve.back()) > 1e-9)
        throw ConfigError("lift_contractibility_tag: curve is not closed");
    for (const Vec3& x : curve)
        if (std::abs(norm(x) - 1) > 1e-9)
            throw ConfigError("lift_contractibility_tag: vertex off the unit sphere");

    // chart pole as far from the curve as possible; parity does not depend on
    // the choice, so any admissible chart gives the same tag
    std::vector<Vec3> candidates = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    std::uint64_t state = 0x2545f4914f6cdd1dull;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return double(state >> 11) * 0x1p-53 * 2 - 1;
    };
    for (int i = 0; i < 24; ++i) candidates.push_back(normalized(Vec3{next(), next(), next()}));
    Vec3 pole{};
    double best = -1;
    for (const Vec3& p : candidates) {
        double d = 1e300;
        for (const Vec3& x : curve) d = std::min(d, norm(x - p));
        if (d > best) {
            best = d;
            pole = p;
        }
    }
    if (best < kMinPoleGap)
        throw NumericsError("lift_contractibility_tag: curve leaves no room for a chart pole");

    Vec3 q1 = std::abs(pole[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    q1 = normalized(q1 - dot(q1, pole) * pole);
    Vec3 q2 = cross(pole, q1);
    std::vector<Vec2> plane;
    plane.reserve(curve.size());
    for (const Vec3& x : curve) {
        double denom = 1 - dot(x, pole);
        plane.push_back({dot(x, q1) / denom, dot(x, q2) / denom});
    }

    double total = 0;
    std::size_t n = plane.size() - 1;  // closed: plane[n] == plane[0]
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 d0 = plane[(i + n - 1) % n + 1] - plane[(i + n - 1) % n];
        Vec2 d1 = plane[i + 1] - plane[i];
        if (norm(d0) < 1e-14 || norm(d1) < 1e-14)
            throw ConfigError("lift_contractibility_tag: repeated vertex");
        total += std::atan2(det2(d0, d1), dot(d0, d1));
    }
    double turning = total / (2 * M_PI);
    long rounded = std::lround(turning);
    if (std::abs(turning - double(rounded)) > 1e-6)
        throw NumericsError("lift_contractibility_tag: turning number " + fmt("%.6f", turning) +
                            " is not an integer; the projection is too degenerate");
    return rounded % 2 == 0;
}

FigureEightCurves figure_eight_curves(int n) {
    if (n < 256) throw ConfigError("figure_eight_curves: need at least 256 samples");
    FigureEightCurves out;
    out.base.reserve(std::size_t(n) + 1);
    out.lift.reserve(std::size_t(n) + 1);
    out.sphere_lift.reserve(std::size_t(n) + 1);
    for (int i = 0; i < n; ++i) {
        double th = 2 * M_PI * i / n;
        Vec3 c{0.5 * (1 + std::cos(2 * th)), 0.5 * std::sin(2 * th), std::sin(th)};
        Vec3 g{-0.5 * std::sin(2 * th), 0.5 * (std::cos(2 * th) - 1), std::cos(th)};
        out.base.push_back(c);
        out.lift.push_back({c, g});
        out.sphere_lift.push_back({1 / std::sqrt(2.0), 0, std::cos(th) / std::sqrt(2.0),
                                   std::sin(th) / std::sqrt(2.0)});
    }
    out.base.push_back(out.base.front());
    out.lift.push_back(out.lift.front());
    out.sphere_lift.push_back(out.sphere_lift.front());
    return out;
}

}  // namespace flab
