#include "flab/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "flab/errors.hpp"

namespace flab {

CurvatureTrack curvature_along(const Trajectory& traj) {
    auto surf = traj.surface;
    auto path = std::make_shared<OdeResult<4>>(traj.path);
    return [surf, path](double t) { return surf->curvature(path->at(t)[0]); };
}

JacobiSolution jacobi_scalar(const CurvatureTrack& K, double f0, double df0, double T) {
    if (!(T > 0)) throw ConfigError("jacobi_scalar: nonpositive duration");
    auto rhs = [&K](double t, const Vec2& y, Vec2& d) {
        d[0] = y[1];
        d[1] = -K(t) * y[0];
    };
    OdeOptions oo;
    oo.abs_tol = oo.rel_tol = 1e-11;
    oo.dt_max = 0.01;
    JacobiSolution sol;
    sol.path = integrate<2>(rhs, Vec2{f0, df0}, 0.0, T, oo);
    return sol;
}

double jacobi_first_zero(const CurvatureTrack& K, double f0, double df0, double T_max) {
    auto rhs = [&K](double t, const Vec2& y, Vec2& d) {
        d[0] = y[1];
        d[1] = -K(t) * y[0];
    };
    OdeOptions oo;
    oo.abs_tol = oo.rel_tol = 1e-11;
    oo.dt_max = 0.01;
    EventSpec<2> ev;
    ev.fn = [](double, const Vec2& y) { return y[0]; };
    ev.direction = 0;
    ev.t_min = 1e-6;
    auto res = integrate<2>(rhs, Vec2{f0, df0}, 0.0, T_max, oo, &ev);
    if (res.stop != OdeStop::event)
        throw NumericsError("jacobi_first_zero: no zero before the horizon");
    return res.t_end();
}

namespace {

struct AngleRun {
    double theta_end;
    double min_rate;
};

AngleRun run_angle(const CurvatureTrack& K, double theta0, double T) {
    auto rhs = [&K](double t, const std::array<double, 1>& y, std::array<double, 1>& d) {
        double c = std::cos(y[0]), s = std::sin(y[0]);
        d[0] = c * c + K(t) * s * s;
    };
    OdeOptions oo;
    oo.abs_tol = oo.rel_tol = 1e-12;
    oo.dt_max = 0.01;
    auto res = integrate<1>(rhs, std::array<double, 1>{theta0}, 0.0, T, oo);
    AngleRun out;
    out.theta_end = res.y.back()[0];
    out.min_rate = res.dy.front()[0];
    for (const auto& d : res.dy) out.min_rate = std::min(out.min_rate, d[0]);
    return out;
}

// golden-section extremum of a smooth scalar function on [a, b]
template <class F>
double golden_opt(F f, double a, double b, bool maximize, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        bool pick_c = maximize ? (fc > fd) : (fc < fd);
        if (pick_c) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

RotationResult rotation_angle(const CurvatureTrack& K, Vec2 w0, double T) {
    if (!(T > 0)) throw ConfigError("rotation_angle: nonpositive duration");
    if (w0[0] == 0 && w0[1] == 0) throw ContractError("rotation_angle: zero start vector");
    double theta0 = std::atan2(w0[1], w0[0]);
    auto run = run_angle(K, theta0, T);
    return RotationResult{(run.theta_end - theta0) / (2 * M_PI), run.min_rate};
}

int mu_hat(double lo, double hi, double snap) {
    if (hi < lo) throw ContractError("mu_hat: inverted interval");
    if (hi - lo >= 0.5) throw ContractError("mu_hat: interval of width >= 1/2");
    auto snapped = [snap](double x) {
        double r = std::round(x);
        return std::fabs(x - r) <= snap ? r : x;
    };
    double a = snapped(lo), b = snapped(hi);
    double k = std::ceil(a);
    if (k <= b) return static_cast<int>(2 * k);
    return static_cast<int>(2 * std::floor(a) + 1);
}

RotationRecord cz_index(const RandersMetric& m, const Trajectory& orbit, const std::string& id,
                        int fan) {
    (void)m;
    if (fan < 8) throw ConfigError("cz_index: fan too small");
    if (orbit.size() < 2) throw ContractError("cz_index: empty orbit");
    const Vec4& a = orbit.path.y.front();
    const Vec4& b = orbit.path.y.back();
    double gap = std::fabs(b[0] - a[0]) + std::fabs(std::remainder(b[1] - a[1], 2 * M_PI)) +
                 std::fabs(b[2] - a[2]) + std::fabs(b[3] - a[3]);
    if (gap > 1e-6) throw ContractError("cz_index: orbit does not close up");

    double t0 = orbit.path.t.front();
    CurvatureTrack Kabs = curvature_along(orbit);
    CurvatureTrack K = [Kabs, t0](double t) { return Kabs(t0 + t); };
    double T = orbit.t_end() - t0;

    RotationRecord rec;
    rec.orbit = id;
    rec.T = T;
    rec.min_rate = HUGE_VAL;
    // the angle equation is pi-periodic in the start angle
    auto delta_of = [&](double theta0) {
        auto run = run_angle(K, theta0, T);
        rec.min_rate = std::min(rec.min_rate, run.min_rate);
        return (run.theta_end - theta0) / (2 * M_PI);
    };
    std::vector<double> deltas(fan);
    int imin = 0, imax = 0;
    for (int i = 0; i < fan; ++i) {
        deltas[i] = delta_of(M_PI * i / fan);
        if (deltas[i] < deltas[imin]) imin = i;
        if (deltas[i] > deltas[imax]) imax = i;
    }
    double step = M_PI / fan;
    double at_min = golden_opt(delta_of, M_PI * imin / fan - step, M_PI * imin / fan + step, false,
                               1e-6);
    double at_max = golden_opt(delta_of, M_PI * imax / fan - step, M_PI * imax / fan + step, true,
                               1e-6);
    rec.lo = std::min(deltas[imin], delta_of(at_min));
    rec.hi = std::max(deltas[imax], delta_of(at_max));
    rec.cz = mu_hat(rec.lo, rec.hi);
    return rec;
}

std::vector<ConvexityEntry> dynamical_convexity_report(const RandersMetric& m,
                                                       const std::vector<TaggedOrbit>& orbits) {
    double r = m.reversibility_closed_form();
    double kmax = m.surface().pinch().Kmax;
    double bound = 2 * M_PI * (1 + 1 / r) / std::sqrt(kmax);
    std::vector<ConvexityEntry> out;
    out.reserve(orbits.size());
    for (const auto& in : orbits) {
        ConvexityEntry e;
        e.orbit = in.id;
        e.contractible_lift = in.contractible_lift;
        e.rotation = cz_index(m, in.traj, in.id);
        e.length = e.rotation.T;  // unit speed
        e.length_bound = bound;
        e.length_ok = !in.contractible_lift || e.length >= bound - 1e-9;
        e.rotation_exceeds_full_turn = e.rotation.lo > 1.0;
        e.convex_consistent = !in.contractible_lift || e.rotation.cz >= 3;
        out.push_back(std::move(e));
    }
    return out;
}

LinearizedCheck linearized_flow_oracle(const RandersMetric& m, double phi, double T, double dphi) {
    if (!(dphi > 0)) throw ConfigError("linearized_flow_oracle: nonpositive step");
    if (!(phi > 0) || phi + dphi > phi_max(m, 0.0))
        throw RangeError("linearized_flow_oracle: family leaves the admissible angle range");

    TangentVector v0 = unit_vector_at_angle(m, 0.0, 0.0, phi);
    TangentVector v1 = unit_vector_at_angle(m, 0.0, 0.0, phi + dphi);
    auto c0 = integrate_finsler_geodesic(m, v0, T);
    auto c1 = integrate_finsler_geodesic(m, v1, T);
    if (c0.pole_truncated || c1.pole_truncated)
        throw ProximityError("linearized_flow_oracle: family reaches the pole margin");

    // initial transverse speed of the family, by differencing the launch map
    const double h = 1e-6;
    TangentVector vp = unit_vector_at_angle(m, 0.0, 0.0, phi + h);
    TangentVector vm = unit_vector_at_angle(m, 0.0, 0.0, phi - h);
    Vec2 dv{(vp.vs - vm.vs) / (2 * h), (vp.vtheta - vm.vtheta) / (2 * h)};
    TangentVector p0 = perp_vector(m, v0);
    SymMat2 g0 = fundamental_tensor_closed_form(m, v0);
    double df0 = g0.bilin(dv, Vec2{p0.vs, p0.vtheta});

    auto K = curvature_along(c0);
    auto jac = jacobi_scalar(K, 0.0, df0, T);

    LinearizedCheck out;
    out.dphi = dphi;
    double worst = 0, fscale = 0;
    const int n = 400;
    for (int k = 1; k <= n; ++k) {
        double t = T * k / n;
        Vec4 y0 = c0.state_at(t);
        Vec4 y1 = c1.state_at(t);
        TangentVector cd{y0[0], y0[1], y0[2], y0[3]};
        TangentVector pp = perp_vector(m, cd);
        SymMat2 g = fundamental_tensor_closed_form(m, cd);
        Vec2 jfd{(y1[0] - y0[0]) / dphi, (y1[1] - y0[1]) / dphi};
        double fd = g.bilin(jfd, Vec2{pp.vs, pp.vtheta});
        double f = jac.f_at(t);
        worst = std::max(worst, std::fabs(fd - f));
        fscale = std::max(fscale, std::fabs(f));
        double resid = std::fabs(f * g.bilin(Vec2{y0[2], y0[3]}, Vec2{pp.vs, pp.vtheta}));
        out.max_perp_residual = std::max(out.max_perp_residual, resid);
    }
    out.max_deviation = worst / std::max(fscale, 1e-12);
    return out;
}

}  // namespace flab
