#include "flab/profile.hpp"

#include <algorithm>
#include <cmath>

#include "flab/errors.hpp"
#include "flab/ode.hpp"

namespace flab {

// === pinch function ===

double PinchFunction::eval(double x) const {
    x = std::clamp(x, 0.0, domain_end());
    if (degenerate_cap) return 1.0 - x;
    double a = xstar - halfwidth, b = xstar + halfwidth;
    if (x <= a) return 1.0 - Kmax * x;
    if (x >= b) return R * R - x;
    double u = (x - a) / (2 * halfwidth);
    double M = u * u * u * (1.0 - 0.5 * u);  // integral of the smoothstep 3u^2 - 2u^3
    return 1.0 - Kmax * x + (Kmax - 1.0) * 2 * halfwidth * M;
}

double PinchFunction::deriv(double x) const {
    x = std::clamp(x, 0.0, domain_end());
    if (degenerate_cap) return -1.0;
    double a = xstar - halfwidth, b = xstar + halfwidth;
    if (x <= a) return -Kmax;
    if (x >= b) return -1.0;
    double u = (x - a) / (2 * halfwidth);
    double m = u * u * (3.0 - 2.0 * u);
    return -Kmax + (Kmax - 1.0) * m;
}

double PinchFunction::second(double x) const {
    x = std::clamp(x, 0.0, domain_end());
    if (degenerate_cap) return 0.0;
    double a = xstar - halfwidth, b = xstar + halfwidth;
    if (x <= a || x >= b) return 0.0;
    double u = (x - a) / (2 * halfwidth);
    double mp = 6.0 * u * (1.0 - u);
    return (Kmax - 1.0) * mp / (2 * halfwidth);
}

PinchFunction build_pinch_function(double R, double Kmax, double smoothing) {
    if (!(R > 0) || R > 1) throw ConfigError("build_pinch_function: radius must lie in (0, 1]");
    if (!(Kmax >= 1)) throw ConfigError("build_pinch_function: curvature cap must be >= 1");
    if (!(smoothing >= 0)) throw ConfigError("build_pinch_function: smoothing must be >= 0");

    PinchFunction p;
    p.R = R;
    p.Kmax = Kmax;
    p.smoothing = smoothing;

    if (R == 1.0) {
        if (Kmax != 1.0)
            throw ConfigError("build_pinch_function: R = 1 admits only the round cap Kmax = 1");
        p.degenerate_cap = true;
        return p;
    }
    double necessity = 1.0 / (R * R);
    if (Kmax <= necessity)
        throw InfeasiblePinchError(
            "build_pinch_function: need Kmax > 1/R^2 to close the surface "
            "(total-curvature necessity)");

    p.xstar = (1.0 - R * R) / (Kmax - 1.0);
    p.halfwidth = 0.5 * smoothing;
    double room = std::min(p.xstar, R * R - p.xstar);
    if (p.halfwidth >= room)
        throw ConfigError(
            "build_pinch_function: smoothing too large; the blend erases one of "
            "the constant-slope pieces");
    return p;
}

// === profile surface ===

ProfileSurface::ProfileSurface(PinchFunction pinch, std::vector<double> s, std::vector<double> rho,
                               std::vector<double> z, double L, double tol)
    : pinch_(pinch), s_(std::move(s)), rho_(std::move(rho)), z_(std::move(z)), L_(L), tol_(tol) {
    if (s_.size() < 4 || s_.size() != rho_.size() || s_.size() != z_.size())
        throw NumericsError("ProfileSurface: inconsistent sample arrays");
    double R = pinch_.R;
    for (std::size_t i = 0; i < s_.size(); ++i) {
        if (i > 0 && !(s_[i] > s_[i - 1])) throw NumericsError("ProfileSurface: nodes not increasing");
        if (i > 0 && !(rho_[i] < rho_[i - 1] + 1e-15))
            throw NumericsError("ProfileSurface: rho not decreasing");
        if (rho_[i] > R * std::cos(std::min(s_[i], 0.5 * M_PI)) + 1e-8)
            throw NumericsError("ProfileSurface: rho exceeds the R cos s envelope");
    }
}

double ProfileSurface::rho_half(double s) const {
    // node derivatives come from the ODE itself: rho' = -sqrt(g(rho^2))
    std::size_t lo = 0, hi = s_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (s_[mid] <= s ? lo : hi) = mid;
    }
    double h = s_[hi] - s_[lo];
    double u = (s - s_[lo]) / h;
    double dlo = -std::sqrt(std::max(0.0, pinch_.eval(rho_[lo] * rho_[lo])));
    double dhi = -std::sqrt(std::max(0.0, pinch_.eval(rho_[hi] * rho_[hi])));
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    double h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u);
    double h11 = u * u * (u - 1);
    return h00 * rho_[lo] + h10 * h * dlo + h01 * rho_[hi] + h11 * h * dhi;
}

double ProfileSurface::z_half(double s) const {
    std::size_t lo = 0, hi = s_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (s_[mid] <= s ? lo : hi) = mid;
    }
    double h = s_[hi] - s_[lo];
    double u = (s - s_[lo]) / h;
    double dlo = std::sqrt(std::max(0.0, 1.0 - pinch_.eval(rho_[lo] * rho_[lo])));
    double dhi = std::sqrt(std::max(0.0, 1.0 - pinch_.eval(rho_[hi] * rho_[hi])));
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    double h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u);
    double h11 = u * u * (u - 1);
    return h00 * z_[lo] + h10 * h * dlo + h01 * z_[hi] + h11 * h * dhi;
}

double ProfileSurface::rho(double s) const {
    double a = std::abs(s);
    if (a > L_ + 1e-12) throw RangeError("ProfileSurface::rho: |s| beyond the pole");
    if (a >= L_) return 0.0;
    return rho_half(a);
}

double ProfileSurface::drho(double s) const {
    double r = rho(s);
    double mag = std::sqrt(std::max(0.0, pinch_.eval(r * r)));
    return s >= 0 ? -mag : mag;
}

double ProfileSurface::curvature(double s) const {
    double r = rho(s);
    return -pinch_.deriv(r * r);
}

double ProfileSurface::rho_tolerant(double s) const {
    double a = std::abs(s);
    if (a <= L_) return rho(s);
    if (a > L_ + 0.05) throw RangeError("ProfileSurface::rho_tolerant: too far past the pole");
    // odd reflection through the pole keeps the profile equation satisfied
    return -rho_half(2.0 * L_ - a);
}

double ProfileSurface::drho_tolerant(double s) const {
    double a = std::abs(s);
    double v;
    if (a <= L_) {
        v = -std::sqrt(std::max(0.0, pinch_.eval(rho(a) * rho(a))));
    } else {
        if (a > L_ + 0.05)
            throw RangeError("ProfileSurface::drho_tolerant: too far past the pole");
        double r = rho_half(2.0 * L_ - a);
        v = -std::sqrt(std::max(0.0, pinch_.eval(r * r)));
    }
    return s >= 0 ? v : -v;
}

double ProfileSurface::z(double s) const {
    double a = std::abs(s);
    if (a > L_ + 1e-12) throw RangeError("ProfileSurface::z: |s| beyond the pole");
    double v = (a >= L_) ? z_.back() : z_half(a);
    return s >= 0 ? v : -v;
}

double ProfileSurface::dz(double s) const {
    double r = rho(s);
    return std::sqrt(std::max(0.0, 1.0 - pinch_.eval(r * r)));
}

Vec3 ProfileSurface::embed(double s, double theta) const {
    double r = rho(s);
    return {r * std::cos(theta), r * std::sin(theta), z(s)};
}

Vec3 ProfileSurface::embed_velocity(double s, double theta, double sdot, double thetadot) const {
    double r = rho(s);
    double rp = drho(s);
    double zp = dz(s);  // z is odd, so dz/ds is the same even function on both halves
    double ct = std::cos(theta), st = std::sin(theta);
    return {rp * sdot * ct - r * st * thetadot, rp * sdot * st + r * ct * thetadot, zp * sdot};
}

ProfileSurface solve_profile(const PinchFunction& pinch, double tol) {
    if (!(tol > 0) || tol > 1e-4) throw ConfigError("solve_profile: tolerance out of range");
    const double R = pinch.R;
    const double s0 = 1e-3;
    const double rho_floor = 1e-6;

    // The equatorial band has g(x) = R^2 - x (exactly, by construction), where
    // the profile is the analytic branch rho = R cos s.  Seed the integrator on
    // that branch to sidestep the non-uniqueness at rho' = 0.
    // For the round sphere g(x) = 1 - x everywhere and rho = cos s is globally
    // exact, so only a genuine blend can crowd the seed point.
    if (!pinch.degenerate_cap) {
        double branch_end = pinch.xstar + pinch.halfwidth;
        if (R * std::cos(s0) <= std::sqrt(branch_end))
            throw ConfigError("solve_profile: blend window reaches the equator seed point");
    }

    std::vector<double> s_nodes, rho_nodes, z_nodes;
    auto push = [&](double s, double r, double zz) {
        s_nodes.push_back(s);
        rho_nodes.push_back(r);
        z_nodes.push_back(zz);
    };
    // z on the analytic branch: z' = sqrt(1 - R^2 sin^2 u); series is ample at s <= 1e-3
    auto z_branch = [&](double s) { return s - R * R * s * s * s / 6.0; };
    push(0.0, R, 0.0);
    push(0.5 * s0, R * std::cos(0.5 * s0), z_branch(0.5 * s0));

    auto rhs = [&](double, const std::array<double, 2>& y, std::array<double, 2>& d) {
        double g = pinch.eval(y[0] * y[0]);
        d[0] = -std::sqrt(std::max(0.0, g));
        d[1] = std::sqrt(std::max(0.0, 1.0 - g));
    };
    OdeOptions opt;
    opt.abs_tol = opt.rel_tol = tol;
    // Step cap keeps the Hermite interpolant's second derivative accurate
    // through the blend band, where rho'''' scales like 1/smoothing^2.
    opt.dt_max = 2.5e-4;
    opt.dt_init = 1e-5;
    EventSpec<2> ev;
    ev.fn = [&](double, const std::array<double, 2>& y) { return y[0] - rho_floor; };
    ev.direction = -1;

    auto res = integrate<2>(rhs, {R * std::cos(s0), z_branch(s0)}, s0, 3.2, opt, &ev);
    if (res.stop != OdeStop::event)
        throw NumericsError("solve_profile: meridian failed to reach the pole floor");

    for (std::size_t i = 0; i < res.size(); ++i) push(res.t[i], res.y[i][0], res.y[i][1]);

    // endpoint extrapolation: rho' -> -sqrt(g(0)) = -1 at the pole
    double s_ev = res.t.back();
    double rho_ev = res.y.back()[0];
    double slope = std::sqrt(std::max(1e-30, pinch.eval(rho_ev * rho_ev)));
    double L = s_ev + rho_ev / slope;
    double z_pole = res.y.back()[1] + 0.5 * std::sqrt(pinch.Kmax) * rho_ev * rho_ev;
    push(L, 0.0, z_pole);

    return ProfileSurface(pinch, std::move(s_nodes), std::move(rho_nodes), std::move(z_nodes), L, tol);
}

MeridianBound meridian_return_bound(double R, double Kmax, double b, double tol) {
    if (!(b > 0)) throw ConfigError("meridian_return_bound: b must be positive");
    double smoothing = 0.0;
    if (!(R == 1.0 && Kmax == 1.0)) {
        double xstar = (1.0 - R * R) / (Kmax - 1.0);
        if (Kmax <= 1.0 / (R * R))
            throw InfeasiblePinchError("meridian_return_bound: Kmax at or below 1/R^2");
        smoothing = 0.5 * std::min(xstar, R * R - xstar);
    }
    auto surf = solve_profile(build_pinch_function(R, Kmax, smoothing), tol);
    MeridianBound mb;
    mb.two_L = 2.0 * surf.L();
    mb.bound = b * M_PI * R;
    mb.ratio = mb.two_L / (M_PI * R);
    mb.within = mb.two_L < mb.bound;
    return mb;
}

}  // namespace flab
