#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>

#include "doctest.h"
#include "flab/errors.hpp"
#include "flab/geodesics.hpp"
#include "flab/linearized.hpp"
#include "flab/profile.hpp"
#include "flab/randers.hpp"
#include "flab/shooting.hpp"

using namespace flab;

namespace {

const double kPinchedL = 0.87913910250579750;

// root of the theta advance for the reference pinched metric, frozen from the
// first converged run of the solver below
const double kPinchedPhiStar = 0.13093850086966777;
const double kPinchedThalf = 3.0791904446494596;

std::shared_ptr<const ProfileSurface> pinched_surface() {
    static auto surf = std::make_shared<const ProfileSurface>(
        solve_profile(build_pinch_function(0.49, 4.25, 0.01)));
    return surf;
}

std::shared_ptr<const ProfileSurface> round_surface() {
    static auto surf =
        std::make_shared<const ProfileSurface>(solve_profile(build_pinch_function(1.0, 1.0, 0.0)));
    return surf;
}

}  // namespace

TEST_CASE("launch angle grid clusters at both open ends") {
    double phi0 = 1.3;
    auto grid = default_phi_grid(phi0);
    REQUIRE(grid.size() == 64);
    CHECK(grid.front() == doctest::Approx(phi0 * 5e-3).epsilon(1e-12));
    CHECK(grid.back() == doctest::Approx(phi0 * (1 - 5e-3)).epsilon(1e-12));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(grid[i] > 0);
        CHECK(grid[i] < phi0);
        if (i) CHECK(grid[i] > grid[i - 1]);
    }
    // spacing grows away from the lower end and shrinks toward the upper end
    CHECK(grid[1] - grid[0] < grid[32] - grid[31]);
    CHECK(grid[63] - grid[62] < grid[33] - grid[32]);

    CHECK_THROWS_AS(default_phi_grid(0.0), ConfigError);
    CHECK_THROWS_AS(default_phi_grid(1.0, 3), ConfigError);
    CHECK_THROWS_AS(default_phi_grid(1.0, 64, 0.5), ConfigError);
}

TEST_CASE("round sphere sweep is flat and offers no root") {
    RandersMetric m(round_surface(), 0.0);
    auto grid = default_phi_grid(phi_max(m, 0), 16);
    auto sweep = sweep_returns(m, grid);
    REQUIRE(sweep.size() == 16);
    for (const SweepRow& row : sweep) {
        CHECK(row.T == doctest::Approx(M_PI).epsilon(1e-6));
        CHECK(row.theta_adv == doctest::Approx(M_PI).epsilon(1e-6));
    }
    CHECK_THROWS_AS(find_phi_star(m, sweep), BracketError);
}

TEST_CASE("pinched sweep reproduces all four endpoint limits") {
    double phi0 = M_PI / 2;

    // no wind: the advance runs from pi/R (orbits inside the equatorial
    // curvature-1 collar) down to pi at the meridian, the return time from
    // pi down to the meridian length
    RandersMetric m1(pinched_surface(), 0.0);
    auto sweep1 = sweep_returns(m1, default_phi_grid(phi0));
    auto lim1 = extrapolate_endpoints(sweep1, phi0);
    CHECK(lim1.theta_at_zero == doctest::Approx(M_PI / 0.49).epsilon(1e-6));
    CHECK(lim1.T_at_zero == doctest::Approx(M_PI).epsilon(1e-6));
    CHECK(lim1.theta_at_max == doctest::Approx(M_PI).epsilon(1e-6));
    CHECK(lim1.T_at_max == doctest::Approx(2 * kPinchedL).epsilon(1e-6));
    CHECK(lim1.theta_at_zero > 2 * M_PI);
    CHECK(lim1.theta_at_max < 2 * M_PI);

    // the advance decreases toward both ends of the sweep
    for (std::size_t i = 1; i < 5; ++i) CHECK(sweep1[i].theta_adv <= sweep1[i - 1].theta_adv);
    for (std::size_t i = 60; i < 64; ++i) CHECK(sweep1[i].theta_adv < sweep1[i - 1].theta_adv);

    // wind for reversibility 2 shifts both limits by eta * (return time)
    RandersMetric m2 = make_randers(pinched_surface(), 2.0);
    double eta = m2.eta();
    CHECK(eta == doctest::Approx(1.0 / (3 * 0.49)).epsilon(1e-12));
    auto sweep2 = sweep_returns(m2, default_phi_grid(phi_max(m2, 0)));
    auto lim2 = extrapolate_endpoints(sweep2, phi_max(m2, 0));
    CHECK(lim2.theta_at_zero == doctest::Approx(M_PI / 0.49 + eta * M_PI).epsilon(1e-6));
    CHECK(lim2.theta_at_max == doctest::Approx(M_PI + 2 * kPinchedL * eta).epsilon(1e-6));
    CHECK(lim2.T_at_max == doctest::Approx(2 * kPinchedL).epsilon(1e-6));
    CHECK(lim2.theta_at_max < 2 * M_PI);

    CHECK_THROWS_AS(extrapolate_endpoints(sweep1, phi0, 200), ConfigError);
    CHECK_THROWS_AS(extrapolate_endpoints(sweep1, 0.5 * phi0), ConfigError);
}

TEST_CASE("advance root is bracketed and refined to the frozen value") {
    RandersMetric m(pinched_surface(), 0.0);
    double phi_star = find_phi_star(m);
    CHECK(phi_star == doctest::Approx(kPinchedPhiStar).epsilon(1e-8));
    CHECK(phi_star > 0);
    CHECK(phi_star < phi_max(m, 0));
    auto ret = first_equator_return(m, phi_star);
    CHECK(std::fabs(ret.theta_adv - 2 * M_PI) < 1e-9);
    CHECK(ret.T == doctest::Approx(kPinchedThalf).epsilon(1e-8));
}

TEST_CASE("closed orbit assembles from its mirrored half") {
    RandersMetric m(pinched_surface(), 0.0);
    ClosedOrbit closed = close_up_figure_eight(m, kPinchedPhiStar);
    CHECK(closed.T_half == doctest::Approx(kPinchedThalf).epsilon(1e-8));
    CHECK(closed.closure_residual < 1e-6);
    CHECK(closed.orbit.t_end() == doctest::Approx(2 * closed.T_half).epsilon(1e-12));

    // end state matches the start up to the double winding
    Vec4 a = closed.orbit.state_at(0);
    Vec4 b = closed.orbit.state_at(closed.orbit.t_end());
    CHECK(std::fabs(b[0] - a[0]) < 1e-9);
    CHECK(b[1] - a[1] == doctest::Approx(4 * M_PI).epsilon(1e-9));
    CHECK(std::fabs(b[2] - a[2]) < 1e-9);
    CHECK(std::fabs(b[3] - a[3]) < 1e-9);

    // unit speed along the whole doubled orbit
    for (int i = 0; i <= 64; ++i) {
        double t = closed.orbit.t_end() * i / 64;
        Vec4 y = closed.orbit.state_at(t);
        TangentVector v{y[0], y[1], y[2], y[3]};
        CHECK(finsler_norm(m, v) == doctest::Approx(1.0).epsilon(1e-7));
    }

    // the mirrored second half equals a re-integrated continuation
    Vec4 yT = closed.orbit.state_at(closed.T_half);
    auto cont = integrate_finsler_geodesic(m, TangentVector{yT[0], yT[1], yT[2], yT[3]},
                                           closed.T_half);
    for (double frac : {0.25, 0.5, 0.75, 0.99}) {
        double tau = frac * closed.T_half;
        Vec4 mirrored = closed.orbit.state_at(closed.T_half + tau);
        Vec4 fresh = cont.state_at(tau);
        for (int k = 0; k < 4; ++k) CHECK(std::fabs(mirrored[k] - fresh[k]) < 1e-6);
    }

    // an angle away from the root leaves a visible closure gap
    CHECK_THROWS_AS(close_up_figure_eight(m, 1.2 * kPinchedPhiStar), NumericsError);
}

TEST_CASE("intersection search handles the closed-form test curves") {
    auto none = count_self_intersections(
        [](double t) { return Vec3{std::cos(t), std::sin(t), 0}; },
        [](double t) { return Vec3{-std::sin(t), std::cos(t), 0}; }, 2 * M_PI);
    CHECK(none.empty());

    // spherical figure-eight with a right-angle crossing at (1, 0, 0)
    SpaceCurve k8_pos = [](double th) {
        return Vec3{0.5 * (1 + std::cos(2 * th)), 0.5 * std::sin(2 * th), std::sin(th)};
    };
    SpaceCurve k8_vel = [](double th) {
        return Vec3{-std::sin(2 * th), std::cos(2 * th), std::cos(th)};
    };
    auto k8 = count_self_intersections(k8_pos, k8_vel, 2 * M_PI);
    REQUIRE(k8.size() == 1);
    CHECK(k8[0].type == CrossingType::transverse);
    CHECK(std::min(k8[0].t_a, 2 * M_PI - k8[0].t_a) < 1e-6);
    CHECK(k8[0].t_b == doctest::Approx(M_PI).epsilon(1e-6));
    CHECK(k8[0].angle == doctest::Approx(M_PI / 2).epsilon(1e-6));
    CHECK(norm(k8[0].point - Vec3{1, 0, 0}) < 1e-6);
    CHECK(k8[0].gap < 1e-10);

    // a different seed count finds the same single crossing
    IntersectionOptions coarse;
    coarse.n_seeds = 513;
    CHECK(count_self_intersections(k8_pos, k8_vel, 2 * M_PI, coarse).size() == 1);
}

TEST_CASE("tangencies are classified by the velocity angle") {
    // internally tangent circles joined into one closed curve through the
    // origin; the inner loop runs the same way first, then reversed
    auto outer_pos = [](double u) { return Vec3{2 * std::sin(u), 2 * (1 - std::cos(u)), 0}; };
    auto outer_vel = [](double u) { return Vec3{2 * std::cos(u), 2 * std::sin(u), 0}; };

    SpaceCurve same_pos = [outer_pos](double t) {
        if (t < 2 * M_PI) return Vec3{std::sin(t), 1 - std::cos(t), 0};
        return outer_pos(t - 2 * M_PI);
    };
    SpaceCurve same_vel = [outer_vel](double t) {
        if (t < 2 * M_PI) return Vec3{std::cos(t), std::sin(t), 0};
        return outer_vel(t - 2 * M_PI);
    };
    auto same = count_self_intersections(same_pos, same_vel, 4 * M_PI);
    REQUIRE(same.size() == 1);
    CHECK(same[0].type == CrossingType::positive_tangency);
    CHECK(same[0].angle < 1e-6);
    CHECK(norm(same[0].point) < 1e-9);

    SpaceCurve opp_pos = [](double t) {
        if (t < 2 * M_PI) return Vec3{std::sin(t), 1 - std::cos(t), 0};
        double u = t - 2 * M_PI;
        return Vec3{-2 * std::sin(u), 2 * (1 - std::cos(u)), 0};
    };
    SpaceCurve opp_vel = [](double t) {
        if (t < 2 * M_PI) return Vec3{std::cos(t), std::sin(t), 0};
        double u = t - 2 * M_PI;
        return Vec3{-2 * std::cos(u), 2 * std::sin(u), 0};
    };
    auto opp = count_self_intersections(opp_pos, opp_vel, 4 * M_PI);
    REQUIRE(opp.size() == 1);
    CHECK(opp[0].type == CrossingType::negative_tangency);
    CHECK(opp[0].angle == doctest::Approx(M_PI).epsilon(1e-6));
}

TEST_CASE("figure-eight crosses itself exactly once, over the launch point") {
    RandersMetric m(pinched_surface(), 0.0);
    ClosedOrbit closed = close_up_figure_eight(m, kPinchedPhiStar);
    auto events = count_self_intersections(closed.orbit);
    REQUIRE(events.size() == 1);
    const IntersectionEvent& ev = events[0];
    double period = closed.orbit.t_end();
    CHECK(ev.type == CrossingType::transverse);
    CHECK(std::min(ev.t_a, period - ev.t_a) < 1e-6);
    CHECK(ev.t_b == doctest::Approx(closed.T_half).epsilon(1e-6));
    CHECK(norm(ev.point - Vec3{0.49, 0, 0}) < 1e-6);
    CHECK(ev.gap < 1e-10);
    // the crossing angle of the reference metric, frozen
    CHECK(ev.angle == doctest::Approx(0.261877002).epsilon(1e-4));
}

TEST_CASE("end-to-end pinched runs verify both reference targets") {
    ShootingReport one = verify_pinched_figure_eight(1, 0.24);
    CHECK(one.R == doctest::Approx(0.495).epsilon(1e-12));
    CHECK(one.Kmax == doctest::Approx(1.01 / (0.495 * 0.495)).epsilon(1e-12));
    CHECK(one.eta == 0);
    CHECK(one.sweep.size() == 64);
    CHECK(one.kmin_scaled > 0.24);
    CHECK(one.kmin_scaled < 0.25);
    CHECK(one.kmin_scaled == doctest::Approx(0.495 * 0.495 / 1.01).epsilon(1e-6));
    CHECK(one.kmax_scaled <= 1 + 1e-9);
    CHECK(one.kmax_scaled > 0.999);
    CHECK(one.closure_residual < 1e-6);
    REQUIRE(one.intersections.size() == 1);
    CHECK(one.intersections[0].type == CrossingType::transverse);
    CHECK(one.reversibility == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(one.length >= one.rademacher_bound);
    CHECK(one.length_scaled == doctest::Approx(one.length * std::sqrt(one.Kmax)).epsilon(1e-12));
    CHECK(one.phi_star == doctest::Approx(0.11419560284551784).epsilon(1e-6));
    CHECK(one.limits.theta_at_zero == doctest::Approx(2 * M_PI / 0.99).epsilon(1e-6));

    ShootingReport two = verify_pinched_figure_eight(2, 0.43);
    CHECK(two.R == doctest::Approx(0.66).epsilon(1e-12));
    CHECK(two.kmin_scaled > 0.43);
    CHECK(two.kmin_scaled < 4.0 / 9.0);
    CHECK(two.kmin_scaled == doctest::Approx(0.66 * 0.66 / 1.01).epsilon(1e-6));
    CHECK(two.reversibility == doctest::Approx(2.0).epsilon(1e-6));
    REQUIRE(two.intersections.size() == 1);
    CHECK(two.intersections[0].type == CrossingType::transverse);
    CHECK(two.length >= two.rademacher_bound);
    CHECK(two.limits.theta_at_max < 2 * M_PI);

    // the doubled equator of the same window metric rotates just below a
    // full turn, so its index stays 1 while the figure-eight exists
    for (double r : {1.0, 2.0}) {
        ShootingReport rep = r == 1.0 ? std::move(one) : std::move(two);
        auto surf = rep.orbit.surface;
        RandersMetric m(surf, rep.eta);
        double speed = (1 + rep.eta * rep.R) / rep.R;  // dtheta/dt on the equator
        double T2 = 2 * 2 * M_PI / speed;
        auto orbit = integrate_finsler_geodesic(m, unit_vector_at_angle(m, 0, 0, 0), T2);
        RotationRecord rec = cz_index(m, orbit);
        CHECK(rec.cz == 1);
        CHECK(rec.lo == doctest::Approx(0.99).epsilon(1e-6));
    }
}

TEST_CASE("window preconditions reject out-of-range targets") {
    CHECK_THROWS_AS(verify_pinched_figure_eight(1, 0.26), ConfigError);
    CHECK_THROWS_AS(verify_pinched_figure_eight(1, 0.25), ConfigError);
    CHECK_THROWS_AS(verify_pinched_figure_eight(1, -0.1), ConfigError);
    CHECK_THROWS_AS(verify_pinched_figure_eight(0.5, 0.1), ConfigError);
    // explicit radii outside the window for r = 1: R must stay below 1/2
    CHECK_THROWS_AS(verify_pinched_figure_eight(1, 0.24, 0.6, 5.0), ConfigError);
    CHECK_THROWS_AS(verify_pinched_figure_eight(1, 0.24, 0.45, 4.0), ConfigError);  // R^2 Kmax < 1
    CHECK_THROWS_AS(verify_pinched_figure_eight(1, 0.24, 0.45, {}), ConfigError);
}

TEST_CASE("explicit window override runs the reference radii end to end") {
    // same (R, Kmax) as the reference fixture; the pipeline fits its own
    // blend width, so the root lands at its own frozen spot
    ShootingReport rep = verify_pinched_figure_eight(1, 0.2, 0.49, 4.25);
    CHECK(rep.phi_star == doctest::Approx(0.16754677122727257).epsilon(1e-8));
    CHECK(rep.T_half == doctest::Approx(3.0795702807040093).epsilon(1e-8));
    CHECK(rep.kmin_scaled == doctest::Approx(1.0 / 4.25).epsilon(1e-6));
    CHECK(rep.length >= rep.rademacher_bound);
    REQUIRE(rep.intersections.size() == 1);
    CHECK(rep.intersections[0].type == CrossingType::transverse);
}
