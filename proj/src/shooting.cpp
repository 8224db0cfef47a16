#include "flab/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flab/errors.hpp"

namespace flab {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// value at x = 0 of the polynomial through (x_i, y_i), Neville's scheme;
// y[i] holds the value of the polynomial through x_i .. x_{i+lvl-1} as the
// levels advance, so each update combines y[i] with its neighbor y[i+1]
double neville_at_zero(const std::vector<double>& x, std::vector<double> y) {
    std::size_t n = x.size();
    for (std::size_t lvl = 1; lvl < n; ++lvl)
        for (std::size_t i = 0; i + lvl < n; ++i)
            y[i] = (x[i + lvl] * y[i] - x[i] * y[i + 1]) / (x[i + lvl] - x[i]);
    return y[0];
}

}  // namespace

std::vector<double> default_phi_grid(double phi0, int n, double rel_margin) {
    if (!(phi0 > 0)) throw ConfigError("default_phi_grid: phi0 must be positive");
    if (n < 4) throw ConfigError("default_phi_grid: need at least 4 points");
    if (!(rel_margin > 0 && rel_margin < 0.4))
        throw ConfigError("default_phi_grid: rel_margin must lie in (0, 0.4)");
    int lower = n / 2, upper = n - lower;
    auto offsets = [rel_margin](int count) {
        // log-spaced relative offsets from an endpoint, rel_margin .. 0.45
        std::vector<double> u(count);
        for (int k = 0; k < count; ++k)
            u[k] = rel_margin * std::pow(0.45 / rel_margin, double(k) / (count - 1));
        return u;
    };
    std::vector<double> lo = offsets(lower), hi = offsets(upper);
    std::vector<double> grid;
    grid.reserve(n);
    for (double u : lo) grid.push_back(phi0 * u);
    for (int k = upper - 1; k >= 0; --k) grid.push_back(phi0 * (1 - hi[k]));
    return grid;
}

std::vector<SweepRow> sweep_returns(const RandersMetric& m, const std::vector<double>& phis) {
    std::vector<SweepRow> rows;
    rows.reserve(phis.size());
    for (double phi : phis) {
        try {
            EquatorReturn ret = first_equator_return(m, phi);
            rows.push_back({phi, ret.T, ret.theta_adv});
        } catch (const ReturnNotFoundError& e) {
            throw ReturnNotFoundError("sweep_returns: no first return at phi = " + fmt(phi) + ": " +
                                      e.what());
        }
    }
    return rows;
}

EndpointLimits extrapolate_endpoints(const std::vector<SweepRow>& sweep, double phi0, int points) {
    if (points < 2) throw ConfigError("extrapolate_endpoints: need at least 2 points per end");
    if (sweep.size() < std::size_t(points))
        throw ConfigError("extrapolate_endpoints: sweep shorter than the requested stencil");
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (!(sweep[i].phi > sweep[i - 1].phi))
            throw ConfigError("extrapolate_endpoints: sweep must be ascending in phi");
    if (!(sweep.back().phi < phi0))
        throw ConfigError("extrapolate_endpoints: sweep reaches past phi0");

    EndpointLimits lim;
    {
        std::vector<double> x(points), yT(points), yth(points);
        for (int i = 0; i < points; ++i) {
            x[i] = sweep[i].phi;
            yT[i] = sweep[i].T;
            yth[i] = sweep[i].theta_adv;
        }
        lim.T_at_zero = neville_at_zero(x, yT);
        lim.theta_at_zero = neville_at_zero(x, yth);
    }
    {
        std::vector<double> x(points), yT(points), yth(points);
        for (int i = 0; i < points; ++i) {
            const SweepRow& row = sweep[sweep.size() - 1 - i];
            x[i] = phi0 - row.phi;
            yT[i] = row.T;
            yth[i] = row.theta_adv;
        }
        lim.T_at_max = neville_at_zero(x, yT);
        lim.theta_at_max = neville_at_zero(x, yth);
    }
    return lim;
}

double find_phi_star(const RandersMetric& m, const std::vector<SweepRow>& sweep, double root_tol) {
    const double target = 2 * M_PI;
    if (sweep.size() < 2) throw ConfigError("find_phi_star: need a sweep with at least 2 rows");
    std::size_t ib = sweep.size();
    for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
        double ga = sweep[i].theta_adv - target;
        double gb = sweep[i + 1].theta_adv - target;
        if (std::abs(ga) < root_tol) return sweep[i].phi;
        if (ga * gb < 0) {
            ib = i;
            break;
        }
    }
    if (ib == sweep.size()) {
        if (std::abs(sweep.back().theta_adv - target) < root_tol) return sweep.back().phi;
        throw BracketError(
            "find_phi_star: theta advance never crosses 2*pi on the sweep "
            "(metric outside the constructive window)");
    }

    double lo = sweep[ib].phi, hi = sweep[ib + 1].phi;
    double glo = sweep[ib].theta_adv - target, ghi = sweep[ib + 1].theta_adv - target;
    for (int it = 0; it < 200; ++it) {
        double w = hi - lo;
        double mid = hi - ghi * w / (ghi - glo);  // secant, fall back to bisection
        if (!std::isfinite(mid) || mid <= lo + 1e-3 * w || mid >= hi - 1e-3 * w) mid = lo + 0.5 * w;
        double g = first_equator_return(m, mid).theta_adv - target;
        if (std::abs(g) < root_tol) return mid;
        if ((g < 0) == (glo < 0)) {
            lo = mid;
            glo = g;
        } else {
            hi = mid;
            ghi = g;
        }
    }
    throw NumericsError("find_phi_star: root refinement did not converge");
}

double find_phi_star(const RandersMetric& m, double root_tol) {
    return find_phi_star(m, sweep_returns(m, default_phi_grid(phi_max(m, 0))), root_tol);
}

ClosedOrbit close_up_figure_eight(const RandersMetric& m, double phi_star, double tol) {
    EquatorReturn ret = first_equator_return(m, phi_star);
    const Trajectory& half = ret.trajectory;
    if (std::abs(half.t_end() - ret.T) > 1e-9)
        throw NumericsError("close_up_figure_eight: half orbit does not end at the return event");

    // The reflection s -> -s is an isometry, so the second half is the mirror
    // of the first shifted by theta_adv.  The join at T is smooth whenever the
    // conserved quantities hold; the join at 2T additionally needs
    // theta_adv = 2*pi.  Both enter the residual.
    TangentVector v0 = unit_vector_at_angle(m, 0, 0, phi_star);
    const Vec4& yT = half.path.y.back();
    double residual = std::abs(yT[0]) + std::abs(ret.theta_adv - 2 * M_PI) +
                      std::abs(yT[2] + v0.vs) + std::abs(yT[3] - v0.vtheta);
    if (!(residual < tol))
        throw NumericsError("close_up_figure_eight: closure residual " + fmt(residual) +
                            " exceeds " + fmt(tol));

    ClosedOrbit out;
    out.T_half = ret.T;
    out.theta_adv = ret.theta_adv;
    out.closure_residual = residual;

    Trajectory full;
    full.surface = half.surface;
    full.eta = half.eta;
    full.pole_touched = half.pole_touched;
    full.pole_truncated = false;
    full.pole_passes = 2 * half.pole_passes;
    full.path.t = half.path.t;
    full.path.y = half.path.y;
    full.path.dy = half.path.dy;
    full.path.stop = OdeStop::horizon;
    for (std::size_t i = 1; i < half.path.t.size(); ++i) {
        const Vec4& y = half.path.y[i];
        const Vec4& dy = half.path.dy[i];
        full.path.t.push_back(ret.T + half.path.t[i]);
        full.path.y.push_back({-y[0], y[1] + ret.theta_adv, -y[2], y[3]});
        full.path.dy.push_back({-dy[0], dy[1], -dy[2], dy[3]});
    }
    out.orbit = std::move(full);
    return out;
}

namespace {

// closest-approach parameters of two segments a0 + la*da, b0 + mu*db
double segment_gap(const Vec3& a0, const Vec3& da, const Vec3& b0, const Vec3& db) {
    Vec3 r = a0 - b0;
    double A = dot(da, da), B = dot(da, db), C = dot(db, db);
    double D = dot(da, r), E = dot(db, r);
    double den = A * C - B * B;
    double la = 0;
    if (den > 1e-30) la = std::clamp((B * E - C * D) / den, 0.0, 1.0);
    double mu = C > 1e-30 ? std::clamp((B * la + E) / C, 0.0, 1.0) : 0.0;
    la = A > 1e-30 ? std::clamp((B * mu - D) / A, 0.0, 1.0) : 0.0;
    return norm((a0 + la * da) - (b0 + mu * db));
}

double wrap_param(double t, double period) { return t - period * std::floor(t / period); }

double circular_gap(double a, double b, double period) {
    double d = std::abs(a - b);
    return std::min(d, period - d);
}

struct RefinedPair {
    double t = 0, u = 0, gap = 0;
};

// Gauss-Newton with a touch of damping on |pos(t) - pos(u)|^2
RefinedPair refine_pair(const SpaceCurve& pos, const SpaceCurve& vel, double period, double t,
                        double u) {
    double damp = 1e-12;
    for (int it = 0; it < 80; ++it) {
        Vec3 r = pos(wrap_param(t, period)) - pos(wrap_param(u, period));
        Vec3 vt = vel(wrap_param(t, period));
        Vec3 vu = vel(wrap_param(u, period));
        double g0 = dot(r, vt), g1 = -dot(r, vu);
        double h00 = dot(vt, vt) + damp, h01 = -dot(vt, vu), h11 = dot(vu, vu) + damp;
        double den = h00 * h11 - h01 * h01;
        if (!(den > 1e-30)) {
            damp = std::max(1e-9, damp * 100);
            continue;
        }
        double dt = -(h11 * g0 - h01 * g1) / den;
        double du = -(h00 * g1 - h01 * g0) / den;
        t += dt;
        u += du;
        if (std::abs(dt) + std::abs(du) < 1e-14 * std::max(1.0, period)) break;
    }
    RefinedPair out;
    out.t = wrap_param(t, period);
    out.u = wrap_param(u, period);
    out.gap = norm(pos(out.t) - pos(out.u));
    return out;
}

}  // namespace

std::vector<IntersectionEvent> count_self_intersections(const SpaceCurve& pos, const SpaceCurve& vel,
                                                        double period,
                                                        const IntersectionOptions& opt) {
    if (!(period > 0)) throw ConfigError("count_self_intersections: period must be positive");
    if (opt.n_seeds < 8) throw ConfigError("count_self_intersections: need at least 8 seeds");
    int n = opt.n_seeds;
    double h = period / n;
    double sep = opt.param_sep > 0 ? opt.param_sep : 8 * h;

    std::vector<Vec3> pts(n + 1);
    for (int i = 0; i <= n; ++i) pts[i] = pos(std::min(i * h, period));
    double hmax = 0;
    for (int i = 0; i < n; ++i) hmax = std::max(hmax, norm(pts[i + 1] - pts[i]));
    double coarse = std::max(3 * hmax, 10 * opt.proximity);

    std::vector<IntersectionEvent> events;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (circular_gap((i + 0.5) * h, (j + 0.5) * h, period) < sep) continue;
            if (segment_gap(pts[i], pts[i + 1] - pts[i], pts[j], pts[j + 1] - pts[j]) > coarse)
                continue;
            RefinedPair ref = refine_pair(pos, vel, period, (i + 0.5) * h, (j + 0.5) * h);
            if (ref.gap > opt.proximity) continue;
            if (circular_gap(ref.t, ref.u, period) < sep) continue;

            double a = std::min(ref.t, ref.u), b = std::max(ref.t, ref.u);
            bool merged = false;
            for (IntersectionEvent& ev : events) {
                // unordered circle-pair comparison: near the period seam the
                // same crossing can resurface with its parameters swapped
                bool same = (circular_gap(ev.t_a, a, period) < 4 * h &&
                             circular_gap(ev.t_b, b, period) < 4 * h) ||
                            (circular_gap(ev.t_a, b, period) < 4 * h &&
                             circular_gap(ev.t_b, a, period) < 4 * h);
                if (same) {
                    if (a < ev.t_a) {  // keep the representative closest to t = 0
                        ev.t_a = a;
                        ev.t_b = b;
                    }
                    merged = true;
                    break;
                }
            }
            if (merged) continue;
            IntersectionEvent ev;
            ev.t_a = a;
            ev.t_b = b;
            events.push_back(ev);
        }
    }

    for (IntersectionEvent& ev : events) {
        ev.gap = norm(pos(ev.t_a) - pos(ev.t_b));
        Vec3 va = vel(ev.t_a), vb = vel(ev.t_b);
        double c = dot(va, vb) / std::max(1e-300, norm(va) * norm(vb));
        ev.angle = std::acos(std::clamp(c, -1.0, 1.0));
        ev.point = 0.5 * (pos(ev.t_a) + pos(ev.t_b));
        double off_tangent = std::min(ev.angle, M_PI - ev.angle);
        if (off_tangent > opt.angle_tol)
            ev.type = CrossingType::transverse;
        else if (ev.gap <= 1e-3 * opt.proximity)
            ev.type = ev.angle < 0.5 * M_PI ? CrossingType::positive_tangency
                                            : CrossingType::negative_tangency;
        else
            ev.type = CrossingType::ambiguous;
    }
    std::sort(events.begin(), events.end(),
              [](const IntersectionEvent& x, const IntersectionEvent& y) { return x.t_a < y.t_a; });
    return events;
}

std::vector<IntersectionEvent> count_self_intersections(const Trajectory& curve,
                                                        const IntersectionOptions& opt) {
    if (curve.size() < 2) throw ConfigError("count_self_intersections: trajectory has no samples");
    double t0 = curve.path.t.front();
    double period = curve.t_end() - t0;
    if (!(period > 0)) throw ConfigError("count_self_intersections: degenerate parameter range");
    if (norm(curve.ambient_at(t0) - curve.ambient_at(t0 + period)) > 1e-5)
        throw ContractError("count_self_intersections: trajectory is not closed");

    const ProfileSurface& surf = *curve.surface;
    SpaceCurve pos = [&curve, t0, period](double t) {
        return curve.ambient_at(t0 + wrap_param(t, period));
    };
    SpaceCurve vel = [&curve, &surf, t0, period](double t) {
        Vec4 y = curve.state_at(t0 + wrap_param(t, period));
        return surf.embed_velocity(y[0], y[1], y[2], y[3]);
    };
    return count_self_intersections(pos, vel, period, opt);
}

ShootingReport verify_pinched_figure_eight(double r, double delta, std::optional<double> R_override,
                                           std::optional<double> Kmax_override) {
    const char* who = "verify_pinched_figure_eight";
    auto fail = [who](const std::string& stage, const std::string& msg) {
        throw NumericsError(std::string(who) + "[" + stage + "]: " + msg);
    };
    if (!(r >= 1)) throw ConfigError(std::string(who) + ": reversibility must be >= 1");
    double q = r / (r + 1);
    if (!(delta > 0 && delta < q * q))
        throw ConfigError(std::string(who) + ": pinch target must lie in (0, (r/(r+1))^2), got " +
                          fmt(delta));

    ShootingReport rep;
    rep.r = r;
    rep.delta = delta;

    // Constructive window: R below r/(r+1) and cap above 1/R^2.  The surface
    // has K in [1, Kmax], so after dilating the cap to 1 the curvature floor
    // is 1/Kmax, which must clear the pinch target.
    if (R_override.has_value() != Kmax_override.has_value())
        throw ConfigError(std::string(who) + ": override R and Kmax together or not at all");
    if (R_override) {
        rep.R = *R_override;
        rep.Kmax = *Kmax_override;
        if (!(rep.R > 0 && rep.R < q))
            throw ConfigError(std::string(who) + ": window needs 0 < R < r/(r+1) = " + fmt(q) +
                              ", got R = " + fmt(rep.R));
        if (!(rep.R * rep.R * rep.Kmax > 1))
            throw ConfigError(std::string(who) + ": window needs R^2 Kmax > 1");
        if (!(1.0 / rep.Kmax > delta))
            throw ConfigError(std::string(who) +
                              ": scaled curvature floor 1/Kmax does not clear the pinch target");
    } else {
        double margin = 1e-2;
        for (int tries = 0;; ++tries) {
            rep.R = q * (1 - margin);
            rep.Kmax = (1 + margin) / (rep.R * rep.R);
            if (1.0 / rep.Kmax > delta) break;
            if (tries >= 60) fail("window", "no margin fits the pinch target " + fmt(delta));
            margin *= 0.5;
        }
    }

    double xstar = (1 - rep.R * rep.R) / (rep.Kmax - 1);
    rep.smoothing = 0.5 * std::min(xstar, rep.R * rep.R - xstar);
    auto surf = std::make_shared<const ProfileSurface>(
        solve_profile(build_pinch_function(rep.R, rep.Kmax, rep.smoothing)));
    RandersMetric m = make_randers(surf, r);
    rep.eta = m.eta();

    double phi0 = phi_max(m, 0);
    try {
        rep.sweep = sweep_returns(m, default_phi_grid(phi0));
        rep.limits = extrapolate_endpoints(rep.sweep, phi0);
    } catch (const Error& e) {
        fail("sweep", e.what());
    }

    try {
        rep.phi_star = find_phi_star(m, rep.sweep);
    } catch (const Error& e) {
        fail("root", e.what());
    }

    try {
        ClosedOrbit closed = close_up_figure_eight(m, rep.phi_star);
        rep.T_half = closed.T_half;
        rep.closure_residual = closed.closure_residual;
        rep.orbit = std::move(closed.orbit);
    } catch (const Error& e) {
        fail("closure", e.what());
    }

    rep.intersections = count_self_intersections(rep.orbit);
    if (rep.intersections.size() != 1)
        fail("intersections", "expected exactly one self-intersection, found " +
                                  std::to_string(rep.intersections.size()));
    const IntersectionEvent& hit = rep.intersections.front();
    if (hit.type != CrossingType::transverse)
        fail("intersections", "the self-intersection is not transverse (angle " + fmt(hit.angle) +
                                  ", gap " + fmt(hit.gap) + ")");
    // the single crossing must sit over the launch point: parameters {0, T}
    // mod the period, so the open first half carries no crossing
    double period = 2 * rep.T_half;
    if (std::min(hit.t_a, period - hit.t_a) > 1e-6 * period ||
        std::abs(hit.t_b - rep.T_half) > 1e-6 * period)
        fail("intersections", "crossing away from the launch point: t_a = " + fmt(hit.t_a) +
                                  ", t_b = " + fmt(hit.t_b));

    // curvature window after dilating so the cap value becomes 1
    double kmin = surf->curvature(0), kmax = kmin;
    const int scan = 4000;
    for (int i = 0; i <= scan; ++i) {
        double s = -surf->L() + 2 * surf->L() * i / scan;
        double K = surf->curvature(s);
        kmin = std::min(kmin, K);
        kmax = std::max(kmax, K);
    }
    for (std::size_t i = 0; i < rep.orbit.size(); ++i) {
        double K = surf->curvature(rep.orbit.path.y[i][0]);
        kmin = std::min(kmin, K);
        kmax = std::max(kmax, K);
    }
    rep.kmin_scaled = kmin / rep.Kmax;
    rep.kmax_scaled = kmax / rep.Kmax;
    if (!(rep.kmin_scaled > delta))
        fail("curvature", "scaled curvature floor " + fmt(rep.kmin_scaled) +
                              " does not clear the pinch target " + fmt(delta));
    if (!(rep.kmax_scaled <= 1 + 1e-9))
        fail("curvature", "scaled curvature exceeds 1: " + fmt(rep.kmax_scaled));

    rep.length = period;
    rep.rademacher_bound = 2 * M_PI * (1 + 1 / r) / std::sqrt(rep.Kmax);
    rep.length_scaled = rep.length * std::sqrt(rep.Kmax);
    if (!(rep.length >= rep.rademacher_bound))
        fail("length", "closed geodesic shorter than the two-loop bound: " + fmt(rep.length) +
                           " < " + fmt(rep.rademacher_bound));

    rep.reversibility = reversibility(m);
    if (std::abs(rep.reversibility - r) > 1e-6)
        fail("reversibility", "sampled reversibility " + fmt(rep.reversibility) +
                                  " misses the target " + fmt(r));
    return rep;
}

}  // namespace flab
