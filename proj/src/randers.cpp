#include "flab/randers.hpp"

#include <algorithm>
#include <cmath>

#include "flab/errors.hpp"

namespace flab {

RandersMetric::RandersMetric(std::shared_ptr<const ProfileSurface> surface, double eta)
    : surface_(std::move(surface)), eta_(eta) {
    if (!surface_) throw ConfigError("RandersMetric: null surface");
    if (eta_ < 0) throw ConfigError("RandersMetric: wind strength must be nonnegative");
    // |X|_h = eta rho peaks at the equator
    if (eta_ * surface_->R() >= 1.0)
        throw ConfigError("RandersMetric: navigation condition |X|_h < 1 fails at the equator");
}

double RandersMetric::wind_speed(double s) const { return eta_ * surface_->rho(s); }

double RandersMetric::epsilon(double s) const {
    double w = wind_speed(s);
    return 1.0 - w * w;
}

SymMat2 RandersMetric::h_matrix(double s) const {
    double rho = surface_->rho(s);
    return SymMat2{1.0, 0.0, rho * rho};
}

SymMat2 RandersMetric::a_matrix(double s) const {
    double rho = surface_->rho(s);
    double r2 = rho * rho;
    double eps = 1.0 - eta_ * eta_ * r2;
    // lowered wind X_k = h_kj X^j = (0, rho^2 eta)
    double Xth = r2 * eta_;
    return SymMat2{1.0 / eps, 0.0, r2 / eps + Xth * Xth / (eps * eps)};
}

Vec2 RandersMetric::b_form(double s) const {
    double rho = surface_->rho(s);
    double eps = 1.0 - eta_ * eta_ * rho * rho;
    return Vec2{0.0, -rho * rho * eta_ / eps};
}

double RandersMetric::reversibility_closed_form() const {
    double wR = eta_ * surface_->R();
    return (1.0 + wR) / (1.0 - wR);
}

RandersMetric make_randers(std::shared_ptr<const ProfileSurface> surface, double r_target) {
    if (!surface) throw ConfigError("make_randers: null surface");
    if (r_target < 1.0) throw ConfigError("make_randers: reversibility must be >= 1");
    double eta = (r_target - 1.0) / ((r_target + 1.0) * surface->R());
    return RandersMetric(std::move(surface), eta);
}

RandersMetric make_randers(ProfileSurface surface, double r_target) {
    return make_randers(std::make_shared<const ProfileSurface>(std::move(surface)), r_target);
}

double finsler_norm(const RandersMetric& m, const TangentVector& v) {
    if (v.vs == 0.0 && v.vtheta == 0.0) return 0.0;
    SymMat2 a = m.a_matrix(v.s);
    Vec2 b = m.b_form(v.s);
    Vec2 y{v.vs, v.vtheta};
    return std::sqrt(a.quad(y)) + b[0] * y[0] + b[1] * y[1];
}

double finsler_norm_quadratic(const RandersMetric& m, const TangentVector& v) {
    if (v.vs == 0.0 && v.vtheta == 0.0) return 0.0;
    double rho = m.surface().rho(v.s);
    double eps = m.epsilon(v.s);
    // h(v, X) with X = eta d_theta
    double B = 2.0 * rho * rho * m.eta() * v.vtheta;
    double C = -(v.vs * v.vs + rho * rho * v.vtheta * v.vtheta);
    return (-B + std::sqrt(B * B - 4.0 * eps * C)) / (2.0 * eps);
}

SymMat2 fundamental_tensor(const RandersMetric& m, const TangentVector& v) {
    double rho = m.surface().rho(v.s);
    double hnorm = std::sqrt(v.vs * v.vs + rho * rho * v.vtheta * v.vtheta);
    if (!(hnorm > 0)) throw ConfigError("fundamental_tensor: zero vector");
    // steps matched to the coordinate scales (v_theta carries a 1/rho)
    double ds = 1e-4 * hnorm;
    double dt = ds / rho;
    auto F2 = [&](double ys, double yt) {
        TangentVector u{v.s, v.theta, ys, yt};
        double f = finsler_norm(m, u);
        return f * f;
    };
    double f0 = F2(v.vs, v.vtheta);
    double gss = (F2(v.vs + ds, v.vtheta) - 2.0 * f0 + F2(v.vs - ds, v.vtheta)) / (2.0 * ds * ds);
    double gtt = (F2(v.vs, v.vtheta + dt) - 2.0 * f0 + F2(v.vs, v.vtheta - dt)) / (2.0 * dt * dt);
    double gst = (F2(v.vs + ds, v.vtheta + dt) - F2(v.vs + ds, v.vtheta - dt) -
                  F2(v.vs - ds, v.vtheta + dt) + F2(v.vs - ds, v.vtheta - dt)) /
                 (8.0 * ds * dt);
    SymMat2 g{gss, gst, gtt};
    if (!(g.a11 > 0) || !(g.det() > 0))
        throw ConvexityError("fundamental_tensor: lost positive definiteness");
    return g;
}

SymMat2 fundamental_tensor_closed_form(const RandersMetric& m, const TangentVector& v) {
    SymMat2 a = m.a_matrix(v.s);
    Vec2 b = m.b_form(v.s);
    Vec2 y{v.vs, v.vtheta};
    double alpha = std::sqrt(a.quad(y));
    if (!(alpha > 0)) throw ConfigError("fundamental_tensor_closed_form: zero vector");
    Vec2 yl = a.mul(y);  // lowered a_ij y^j
    double F = alpha + b[0] * y[0] + b[1] * y[1];
    double ell0 = yl[0] / alpha + b[0];
    double ell1 = yl[1] / alpha + b[1];
    double k = F / alpha;
    return SymMat2{k * (a.a11 - yl[0] * yl[0] / (alpha * alpha)) + ell0 * ell0,
                   k * (a.a12 - yl[0] * yl[1] / (alpha * alpha)) + ell0 * ell1,
                   k * (a.a22 - yl[1] * yl[1] / (alpha * alpha)) + ell1 * ell1};
}

namespace {

// F-unit circle at latitude s: v(psi) = X + (cos psi  that + sin psi d_s),
// where that is the h-unit positive-theta direction.  F(v(psi)) = 1 for all
// psi because |v - X|_h = 1.
TangentVector unit_circle_point(const RandersMetric& m, double s, double psi) {
    double rho = m.surface().rho(s);
    double w = m.eta() * rho;
    TangentVector v;
    v.s = s;
    v.vs = std::sin(psi);
    v.vtheta = (w + std::cos(psi)) / rho;
    return v;
}

double reverse_cost(const RandersMetric& m, double s, double psi) {
    TangentVector v = unit_circle_point(m, s, psi);
    TangentVector w{v.s, v.theta, -v.vs, -v.vtheta};
    return finsler_norm(m, w);
}

template <class F>
double golden_max(F f, double a, double b, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

ReversibilityReport reversibility_report(const RandersMetric& m) {
    const ProfileSurface& surf = m.surface();
    double span = 0.9 * surf.L();
    double best = -1, best_s = 0, best_psi = 0;
    // 257 latitudes (middle one exactly the equator) by 256 directions
    for (int i = -128; i <= 128; ++i) {
        double s = span * i / 128.0;
        for (int j = 0; j < 256; ++j) {
            double psi = 2.0 * M_PI * j / 256.0;
            double val = reverse_cost(m, s, psi);
            if (val > best) {
                best = val;
                best_s = s;
                best_psi = psi;
            }
        }
    }
    // coordinatewise refinement around the grid argmax
    double hs = span / 128.0, hpsi = 2.0 * M_PI / 256.0;
    for (int pass = 0; pass < 2; ++pass) {
        double lo = std::max(-span, best_s - hs), hi = std::min(span, best_s + hs);
        best_s = golden_max([&](double s) { return reverse_cost(m, s, best_psi); }, lo, hi, 1e-10);
        best_psi = golden_max([&](double p) { return reverse_cost(m, best_s, p); },
                              best_psi - hpsi, best_psi + hpsi, 1e-10);
    }
    ReversibilityReport rep;
    rep.value = reverse_cost(m, best_s, best_psi);
    rep.s_at = best_s;
    rep.psi_at = best_psi > M_PI ? best_psi - 2.0 * M_PI : best_psi;
    return rep;
}

double reversibility(const RandersMetric& m) { return reversibility_report(m).value; }

double phi_max(const RandersMetric& m, double s) { return std::atan2(1.0, m.wind_speed(s)); }

TangentVector unit_vector_at_angle(const RandersMetric& m, double s, double theta, double phi) {
    double phi0 = phi_max(m, s);
    if (phi < 0 || phi > phi0 + 1e-12)
        throw RangeError("unit_vector_at_angle: angle outside [0, phi_max]");
    double rho = m.surface().rho(s);
    double w = m.eta() * rho;
    // v = mag (cos phi  that + sin phi d_s) with |v - X|_h = 1
    double c = std::cos(phi);
    double mag = w * c + std::sqrt(std::max(0.0, 1.0 - w * w + w * w * c * c));
    TangentVector v;
    v.s = s;
    v.theta = theta;
    v.vs = mag * std::sin(phi);
    v.vtheta = mag * c / rho;
    return v;
}

}  // namespace flab
