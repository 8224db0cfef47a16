#include "flab/geodesics.hpp"

#include <algorithm>
#include <cmath>

#include "flab/errors.hpp"

namespace flab {

namespace {

using State4 = std::array<double, 4>;

// h-geodesic equations on the surface of revolution:
//   s'' = rho rho' thetadot^2,  theta'' = -2 (rho'/rho) sdot thetadot.
// Tolerant chart accessors keep trial stages slightly past a pole valid.
auto h_rhs(const ProfileSurface* surf) {
    return [surf](double, const State4& y, State4& d) {
        double rho = surf->rho_tolerant(y[0]);
        double rp = surf->drho_tolerant(y[0]);
        d[0] = y[2];
        d[1] = y[3];
        d[2] = rho * rp * y[3] * y[3];
        d[3] = rho != 0.0 ? -2.0 * (rp / rho) * y[2] * y[3] : 0.0;
    };
}

void append_run(OdeResult<4>& acc, const OdeResult<4>& res) {
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        if (!acc.t.empty() && res.t[i] <= acc.t.back()) continue;
        acc.t.push_back(res.t[i]);
        acc.y.push_back(res.y[i]);
        acc.dy.push_back(res.dy[i]);
    }
}

struct HRun {
    OdeResult<4> path;
    bool touched = false;
    bool truncated = false;
    std::size_t passes = 0;
    bool event_hit = false;
};

// Segmented h-geodesic integration: runs until the horizon, the optional
// event, or the pole margin.  Near-meridian orbits (tiny Clairaut constant)
// jump across the pole (theta += pi, sdot flips, time advances by the exact
// straight-passage duration) and keep going.
HRun run_h_geodesic(const ProfileSurface* surf, State4 y0, double t0, double t1,
                    const GeodesicOptions& opt, const EventSpec<4>* ev) {
    const double L = surf->L();
    const double margin = L - opt.pole_margin;
    if (std::fabs(y0[0]) >= margin)
        throw ProximityError("run_h_geodesic: initial point inside the pole margin");

    auto rhs = h_rhs(surf);
    auto guard = [&](double, const State4& y) { return std::fabs(y[0]) >= margin; };

    OdeOptions oo;
    oo.abs_tol = oo.rel_tol = opt.tol;
    oo.dt_max = opt.dt_max;
    oo.dt_init = 1e-5;

    HRun run;
    run.path.stop = OdeStop::horizon;
    State4 y = y0;
    double t = t0;
    for (int seg = 0; seg < 100000; ++seg) {
        auto res = integrate<4>(rhs, y, t, t1, oo, ev, guard);
        append_run(run.path, res);
        if (res.stop == OdeStop::event) {
            run.path.stop = OdeStop::event;
            run.event_hit = true;
            return run;
        }
        if (res.stop == OdeStop::horizon) {
            run.path.stop = OdeStop::horizon;
            return run;
        }

        // pole margin reached; discard the overshoot and land exactly on it
        run.touched = true;
        while (!run.path.t.empty() && std::fabs(run.path.y.back()[0]) >= margin) {
            run.path.t.pop_back();
            run.path.y.pop_back();
            run.path.dy.pop_back();
        }
        if (run.path.t.empty())
            throw ProximityError("run_h_geodesic: trajectory starts at the pole margin");
        double tk = run.path.t.back();
        State4 yk = run.path.y.back();
        EventSpec<4> margin_ev;
        margin_ev.fn = [&](double, const State4& yy) { return std::fabs(yy[0]) - margin; };
        margin_ev.direction = +1;
        margin_ev.t_min = tk;
        OdeOptions fine = oo;
        fine.dt_max = 2.5e-4;
        fine.dt_init = 1e-6;
        auto mres = integrate<4>(rhs, yk, tk, std::min(t1, tk + 1.0), fine, &margin_ev, nullptr);
        append_run(run.path, mres);
        if (mres.stop != OdeStop::event) {
            if (mres.stop == OdeStop::horizon && mres.t_end() >= t1 - 1e-12) {
                run.path.stop = OdeStop::horizon;
                return run;
            }
            // wandered back inside without crossing; resume coarse integration
            t = run.path.t.back();
            y = run.path.y.back();
            continue;
        }

        State4 ym = run.path.y.back();
        double tm = run.path.t.back();
        double rho_m = surf->rho(ym[0]);
        double c = rho_m * rho_m * ym[3];
        if (std::fabs(c) >= opt.meridian_clairaut) {
            run.truncated = true;
            run.path.stop = OdeStop::guard;
            return run;
        }

        // straight passage through the pole: meridians keep |sdot| constant
        run.passes += 1;
        double gap = L - std::fabs(ym[0]);
        double dt_jump = 2.0 * gap / std::max(1e-12, std::fabs(ym[2]));
        t = tm + dt_jump;
        y = State4{ym[0], ym[1] + M_PI, -ym[2], ym[3]};
        if (t >= t1) {
            run.path.stop = OdeStop::horizon;
            return run;
        }
    }
    throw NumericsError("run_h_geodesic: segment limit exceeded");
}

Trajectory finish_trajectory(std::shared_ptr<const ProfileSurface> surf, double eta, HRun&& run) {
    Trajectory traj;
    traj.surface = std::move(surf);
    traj.eta = eta;
    traj.path = std::move(run.path);
    traj.pole_touched = run.touched;
    traj.pole_truncated = run.truncated;
    traj.pole_passes = run.passes;
    if (eta != 0.0) {
        for (std::size_t i = 0; i < traj.path.t.size(); ++i) {
            traj.path.y[i][1] += eta * traj.path.t[i];
            traj.path.y[i][3] += eta;
            traj.path.dy[i][1] += eta;
        }
    }
    return traj;
}

}  // namespace

Vec4 Trajectory::state_at(double tq) const { return path.at(tq); }

Vec4 Trajectory::deriv_at(double tq) const { return path.deriv_at(tq); }

GeodesicState Trajectory::sample(std::size_t i) const {
    GeodesicState st;
    st.t = path.t[i];
    st.s = path.y[i][0];
    st.theta = path.y[i][1];
    st.sdot = path.y[i][2];
    st.thetadot = path.y[i][3];
    double rho = surface->rho(st.s);
    st.clairaut = rho * rho * (st.thetadot - eta);
    return st;
}

Vec3 Trajectory::ambient_at(double tq) const {
    Vec4 y = state_at(tq);
    return surface->embed(y[0], y[1]);
}

double Trajectory::clairaut_at(double tq) const {
    Vec4 y = state_at(tq);
    double rho = surface->rho(y[0]);
    return rho * rho * (y[3] - eta);
}

double Trajectory::h_energy_at(double tq) const {
    Vec4 y = state_at(tq);
    double rho = surface->rho(y[0]);
    double td = y[3] - eta;
    return y[2] * y[2] + rho * rho * td * td;
}

Trajectory integrate_h_geodesic(std::shared_ptr<const ProfileSurface> surface,
                                const GeodesicState& init, double T, const GeodesicOptions& opt) {
    if (!surface) throw ConfigError("integrate_h_geodesic: null surface");
    if (!(T > 0)) throw ConfigError("integrate_h_geodesic: nonpositive duration");
    double vnorm = std::hypot(init.sdot, surface->rho(init.s) * init.thetadot);
    if (!(vnorm > 0)) throw ConfigError("integrate_h_geodesic: zero initial velocity");
    State4 y0{init.s, init.theta, init.sdot, init.thetadot};
    auto run = run_h_geodesic(surface.get(), y0, init.t, init.t + T, opt, nullptr);
    return finish_trajectory(std::move(surface), 0.0, std::move(run));
}

Trajectory integrate_finsler_geodesic(const RandersMetric& m, const TangentVector& v0, double T,
                                      const GeodesicOptions& opt) {
    if (!(T > 0)) throw ConfigError("integrate_finsler_geodesic: nonpositive duration");
    double F = finsler_norm(m, v0);
    if (std::fabs(F - 1.0) > 1e-8)
        throw ContractError("integrate_finsler_geodesic: initial vector is not F-unit");
    State4 y0{v0.s, v0.theta, v0.vs, v0.vtheta - m.eta()};
    auto run = run_h_geodesic(&m.surface(), y0, 0.0, T, opt, nullptr);
    return finish_trajectory(m.surface_ptr(), m.eta(), std::move(run));
}

Vec2 spray_coefficients(const RandersMetric& m, const TangentVector& v) {
    const double hx = 1e-5;
    TangentVector vp{v.s + hx, v.theta, v.vs, v.vtheta};
    TangentVector vm{v.s - hx, v.theta, v.vs, v.vtheta};
    SymMat2 gp = fundamental_tensor_closed_form(m, vp);
    SymMat2 gm = fundamental_tensor_closed_form(m, vm);
    SymMat2 g0 = fundamental_tensor_closed_form(m, v);
    // s-derivative of the fundamental tensor; theta-derivatives vanish by
    // rotational symmetry
    double A11 = (gp.a11 - gm.a11) / (2 * hx);
    double A12 = (gp.a12 - gm.a12) / (2 * hx);
    double A22 = (gp.a22 - gm.a22) / (2 * hx);
    double ys = v.vs, yt = v.vtheta;
    double Ay0 = A11 * ys + A12 * yt;
    double Ay1 = A12 * ys + A22 * yt;
    double yAy = ys * Ay0 + yt * Ay1;
    // 2 d_j g_lk y^j y^k - d_l (g_jk y^j y^k), only j = l = s contribute
    double t0 = 2.0 * ys * Ay0 - yAy;
    double t1 = 2.0 * ys * Ay1;
    SymMat2 gi = g0.inverse();
    return Vec2{0.25 * (gi.a11 * t0 + gi.a12 * t1), 0.25 * (gi.a12 * t0 + gi.a22 * t1)};
}

Mat2 spray_connection(const RandersMetric& m, const TangentVector& v) {
    double rho = m.surface().rho(v.s);
    double hnorm = std::hypot(v.vs, rho * v.vtheta);
    if (!(hnorm > 0)) throw ConfigError("spray_connection: zero reference vector");
    double ds = 1e-4 * hnorm;
    double dt = ds / rho;
    auto G = [&](double ys, double yt) {
        return spray_coefficients(m, TangentVector{v.s, v.theta, ys, yt});
    };
    Vec2 Gsp = G(v.vs + ds, v.vtheta), Gsm = G(v.vs - ds, v.vtheta);
    Vec2 Gtp = G(v.vs, v.vtheta + dt), Gtm = G(v.vs, v.vtheta - dt);
    Mat2 gamma;
    gamma[0] = Vec2{(Gsp[0] - Gsm[0]) / (2 * ds), (Gtp[0] - Gtm[0]) / (2 * dt)};
    gamma[1] = Vec2{(Gsp[1] - Gsm[1]) / (2 * ds), (Gtp[1] - Gtm[1]) / (2 * dt)};
    return gamma;
}

Trajectory spray_oracle(const RandersMetric& m, const TangentVector& v0, double T,
                        const GeodesicOptions& opt) {
    if (!(T > 0)) throw ConfigError("spray_oracle: nonpositive duration");
    const ProfileSurface* surf = &m.surface();
    const double L = surf->L();
    const double margin = L - std::max(opt.pole_margin, 1e-2);
    // clamp keeps trial stages of rejected steps inside the strict chart
    auto rhs = [&, surf](double, const State4& y, State4& d) {
        double s = std::clamp(y[0], -L + 5e-4, L - 5e-4);
        Vec2 G = spray_coefficients(m, TangentVector{s, y[1], y[2], y[3]});
        d[0] = y[2];
        d[1] = y[3];
        d[2] = -2.0 * G[0];
        d[3] = -2.0 * G[1];
    };
    auto guard = [&](double, const State4& y) { return std::fabs(y[0]) >= margin; };
    OdeOptions oo;
    oo.abs_tol = oo.rel_tol = opt.tol;
    oo.dt_max = opt.dt_max;
    oo.dt_init = 1e-5;
    State4 y0{v0.s, v0.theta, v0.vs, v0.vtheta};
    Trajectory traj;
    traj.surface = m.surface_ptr();
    traj.eta = m.eta();
    traj.path = integrate<4>(rhs, y0, 0.0, T, oo, nullptr, guard);
    if (traj.path.stop == OdeStop::guard) {
        traj.pole_touched = true;
        traj.pole_truncated = true;
    }
    return traj;
}

namespace {

// Derivative at x of the degree-(n-1) polynomial through (xs[j], fs[j]).
double lagrange_deriv(const double* xs, const double* fs, int n, double x) {
    double acc = 0;
    for (int j = 0; j < n; ++j) {
        double dj = 0;
        for (int mth = 0; mth < n; ++mth) {
            if (mth == j) continue;
            double prod = 1;
            for (int k = 0; k < n; ++k) {
                if (k == j || k == mth) continue;
                prod *= (x - xs[k]) / (xs[j] - xs[k]);
            }
            dj += prod / (xs[j] - xs[mth]);
        }
        acc += fs[j] * dj;
    }
    return acc;
}

Vec2 connection_apply(const Mat2& gamma, const Vec2& u) {
    return Vec2{gamma[0][0] * u[0] + gamma[0][1] * u[1], gamma[1][0] * u[0] + gamma[1][1] * u[1]};
}

}  // namespace

namespace {

// Five stencil nodes around index i with pairwise spacing of at least a
// quarter median step.  Adaptive output can leave nearly coincident samples
// (a step clamped to the horizon); differencing across such a pair would
// amplify the integration noise catastrophically.
std::array<std::size_t, 5> stencil_nodes(const std::vector<double>& t, std::size_t i, double sep) {
    int n = static_cast<int>(t.size());
    std::array<std::size_t, 5> chosen{};
    chosen[0] = i;
    int count = 1;
    int l = static_cast<int>(i), r = static_cast<int>(i);
    int lp = l - 1, rp = r + 1;
    while (count < 5) {
        bool can_l = lp >= 0, can_r = rp < n;
        if (!can_l && !can_r)
            throw NumericsError("covariant_derivative: too few separated samples");
        bool take_left = can_l && (!can_r || t[i] - t[lp] <= t[rp] - t[i]);
        if (take_left) {
            if (t[l] - t[lp] >= sep) {
                chosen[count++] = lp;
                l = lp;
            }
            --lp;
        } else {
            if (t[rp] - t[r] >= sep) {
                chosen[count++] = rp;
                r = rp;
            }
            ++rp;
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace

CovariantSeries covariant_derivative(const RandersMetric& m, const Trajectory& traj,
                                     const std::vector<Vec2>& V) {
    std::size_t n = traj.size();
    if (V.size() != n) throw ContractError("covariant_derivative: sample count mismatch");
    if (n < 5) throw ContractError("covariant_derivative: too few samples");
    std::vector<double> steps(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) steps[i] = traj.path.t[i + 1] - traj.path.t[i];
    std::nth_element(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
    double sep = 0.25 * steps[steps.size() / 2];
    CovariantSeries out;
    out.values.resize(n);
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto nodes = stencil_nodes(traj.path.t, i, sep);
        double ts[5], fs0[5], fs1[5];
        for (int k = 0; k < 5; ++k) {
            ts[k] = traj.path.t[nodes[k]];
            fs0[k] = V[nodes[k]][0];
            fs1[k] = V[nodes[k]][1];
        }
        double x = traj.path.t[i];
        Vec2 vdot{lagrange_deriv(ts, fs0, 5, x), lagrange_deriv(ts, fs1, 5, x)};
        const Vec4& y = traj.path.y[i];
        TangentVector cdot{y[0], y[1], y[2], y[3]};
        Mat2 gamma = spray_connection(m, cdot);
        out.values[i] = vdot + connection_apply(gamma, Vec2{V[i][0], V[i][1]});

        // certification: the curve itself must satisfy the geodesic equation
        const Vec4& dy = traj.path.dy[i];
        Vec2 acc{dy[2], dy[3]};
        Vec2 res = acc + connection_apply(gamma, Vec2{y[2], y[3]});
        double rho = traj.surface->rho(y[0]);
        double scale = std::max(1.0, std::hypot(y[2], rho * y[3]));
        worst = std::max(worst, std::hypot(res[0], rho * res[1]) / scale);
    }
    out.geodesic_certified = worst < 1e-5;
    return out;
}

std::vector<Vec2> parallel_transport(const RandersMetric& m, const Trajectory& traj, Vec2 V0) {
    if (traj.size() < 2) throw ContractError("parallel_transport: empty trajectory");
    auto rhs = [&](double t, const Vec2& v, Vec2& d) {
        Vec4 y = traj.state_at(t);
        Mat2 gamma = spray_connection(m, TangentVector{y[0], y[1], y[2], y[3]});
        Vec2 gv = connection_apply(gamma, v);
        d[0] = -gv[0];
        d[1] = -gv[1];
    };
    OdeOptions oo;
    oo.abs_tol = oo.rel_tol = 1e-10;
    oo.dt_max = 5e-3;
    oo.dt_init = 1e-4;
    // integrate sample to sample so the values land exactly on the grid
    std::vector<Vec2> out(traj.size());
    out[0] = V0;
    Vec2 v = V0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        auto res = integrate<2>(rhs, v, traj.path.t[i - 1], traj.path.t[i], oo);
        v = res.y.back();
        out[i] = v;
    }
    return out;
}

TangentVector perp_vector(const RandersMetric& m, const TangentVector& v) {
    SymMat2 g = fundamental_tensor_closed_form(m, v);
    Vec2 y{v.vs, v.vtheta};
    Vec2 gy = g.mul(y);
    Vec2 p{-gy[1], gy[0]};  // g(v, p) = 0 by construction
    double pn = std::sqrt(g.quad(p));
    if (!(pn > 0)) throw NumericsError("perp_vector: degenerate metric");
    p = (1.0 / pn) * p;
    // orient so (v, p) is positive in the (d_theta, d_s) frame order
    if (y[1] * p[0] - y[0] * p[1] <= 0) p = -1.0 * p;
    return TangentVector{v.s, v.theta, p[0], p[1]};
}

EquatorReturn first_equator_return(const RandersMetric& m, double phi,
                                   const GeodesicOptions& opt) {
    if (!(phi > 0) || phi > phi_max(m, 0.0) + 1e-12)
        throw RangeError("first_equator_return: angle outside (0, phi_max]");
    TangentVector v0 = unit_vector_at_angle(m, 0.0, 0.0, phi);
    EventSpec<4> ev;
    ev.fn = [](double, const State4& y) { return y[0]; };
    ev.direction = -1;
    ev.t_min = 1e-3;
    State4 y0{0.0, 0.0, v0.vs, v0.vtheta - m.eta()};
    auto run = run_h_geodesic(&m.surface(), y0, 0.0, opt.horizon_cap, opt, &ev);
    if (!run.event_hit)
        throw ReturnNotFoundError(run.truncated
                                      ? "first_equator_return: trajectory ended at the pole margin"
                                      : "first_equator_return: no crossing before the horizon");
    EquatorReturn ret;
    ret.trajectory = finish_trajectory(m.surface_ptr(), m.eta(), std::move(run));
    ret.T = ret.trajectory.t_end();
    ret.at_return = ret.trajectory.sample(ret.trajectory.size() - 1);
    ret.theta_adv = ret.at_return.theta;
    return ret;
}

}  // namespace flab
