#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "flab/errors.hpp"
#include "flab/randers.hpp"

using namespace flab;

namespace {

std::shared_ptr<const ProfileSurface> pinched_surface() {
    static auto surf = std::make_shared<const ProfileSurface>(
        solve_profile(build_pinch_function(0.49, 4.25, 0.01)));
    return surf;
}

std::shared_ptr<const ProfileSurface> round_surface() {
    static auto surf = std::make_shared<const ProfileSurface>(
        solve_profile(build_pinch_function(1.0, 1.0, 0.0)));
    return surf;
}

double h_norm(const RandersMetric& m, const TangentVector& v) {
    double rho = m.surface().rho(v.s);
    return std::sqrt(v.vs * v.vs + rho * rho * v.vtheta * v.vtheta);
}

TangentVector random_vector(const RandersMetric& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> us(-0.8, 0.8), uc(-2.0, 2.0);
    for (;;) {
        TangentVector v{us(rng) * m.surface().L(), uc(rng), uc(rng), uc(rng)};
        if (h_norm(m, v) > 0.05) return v;
    }
}

}  // namespace

TEST_CASE("zero wind reduces to the underlying Riemannian norm") {
    auto m = make_randers(round_surface(), 1.0);
    CHECK(m.eta() == 0.0);
    CHECK(m.reversibility_closed_form() == doctest::Approx(1.0));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        auto v = random_vector(m, rng);
        CHECK(finsler_norm(m, v) == doctest::Approx(h_norm(m, v)).epsilon(1e-12));
        double rho = m.surface().rho(v.s);
        auto g = fundamental_tensor(m, v);
        CHECK(std::fabs(g.a11 - 1.0) < 1e-7);
        CHECK(std::fabs(g.a12) < 1e-7 * rho);
        CHECK(std::fabs(g.a22 - rho * rho) < 1e-7 * rho * rho);
    }
    CHECK(reversibility(m) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("moving with the wind is cheap, against it expensive") {
    auto m = make_randers(pinched_surface(), 2.0);
    double R = m.surface().R();
    CHECK(m.eta() * R == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    TangentVector with{0.0, 0.0, 0.0, 1.0 / R};     // h-unit, along the wind
    TangentVector against{0.0, 0.0, 0.0, -1.0 / R};
    CHECK(finsler_norm(m, with) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(finsler_norm(m, against) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("closed-form and quadratic-root evaluations coincide") {
    auto m = make_randers(pinched_surface(), 2.0);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        auto v = random_vector(m, rng);
        double Fa = finsler_norm(m, v);
        double Fq = finsler_norm_quadratic(m, v);
        CHECK(std::fabs(Fa - Fq) < 1e-10 * Fa);

        // defining navigation identity |v - F X|_h = F
        double rho = m.surface().rho(v.s);
        double dvs = v.vs;
        double dvt = v.vtheta - Fa * m.eta();
        double res = std::sqrt(dvs * dvs + rho * rho * dvt * dvt);
        CHECK(res == doctest::Approx(Fa).epsilon(1e-9));

        // positive homogeneity
        TangentVector tv{v.s, v.theta, 2.5 * v.vs, 2.5 * v.vtheta};
        CHECK(finsler_norm(m, tv) == doctest::Approx(2.5 * Fa).epsilon(1e-12));
    }
    TangentVector zero{0.1, 0.0, 0.0, 0.0};
    CHECK(finsler_norm(m, zero) == 0.0);
    CHECK(finsler_norm_quadratic(m, zero) == 0.0);
}

TEST_CASE("difference-quotient fundamental tensor matches the direct formula") {
    auto m = make_randers(pinched_surface(), 2.0);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        auto v = random_vector(m, rng);
        double rho = m.surface().rho(v.s);
        auto g = fundamental_tensor(m, v);
        auto gx = fundamental_tensor_closed_form(m, v);
        double scale = gx.a11 + gx.a22 / (rho * rho);
        CHECK(std::fabs(g.a11 - gx.a11) < 1e-6 * scale);
        CHECK(std::fabs(g.a12 - gx.a12) < 1e-6 * scale * rho);
        CHECK(std::fabs(g.a22 - gx.a22) < 1e-6 * scale * rho * rho);

        // strong convexity
        CHECK(g.a11 > 0);
        CHECK(g.det() > 0);

        // g_v(v, v) = F(v)^2
        double F = finsler_norm(m, v);
        CHECK(gx.quad(Vec2{v.vs, v.vtheta}) == doctest::Approx(F * F).epsilon(1e-10));
        CHECK(g.quad(Vec2{v.vs, v.vtheta}) == doctest::Approx(F * F).epsilon(1e-6));

        // scale invariance of the tensor
        TangentVector tv{v.s, v.theta, 3.0 * v.vs, 3.0 * v.vtheta};
        auto gt = fundamental_tensor_closed_form(m, tv);
        CHECK(gt.a11 == doctest::Approx(gx.a11).epsilon(1e-12));
        CHECK(gt.a12 == doctest::Approx(gx.a12).epsilon(1e-12));
        CHECK(gt.a22 == doctest::Approx(gx.a22).epsilon(1e-12));
    }
}

TEST_CASE("sampled reversibility reproduces the closed form and its maximizer") {
    auto m2 = make_randers(pinched_surface(), 2.0);
    auto rep = reversibility_report(m2);
    CHECK(rep.value == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::fabs(rep.s_at) < 1e-4);
    CHECK(std::fabs(rep.psi_at) < 1e-4);

    auto m3 = make_randers(pinched_surface(), 3.0);
    CHECK(m3.eta() * m3.surface().R() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(reversibility(m3) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(m3.reversibility_closed_form() == doctest::Approx(3.0).epsilon(1e-14));

    CHECK_THROWS_AS(make_randers(pinched_surface(), 0.5), ConfigError);
}

TEST_CASE("unit vectors at a prescribed angle to the wind") {
    auto m = make_randers(pinched_surface(), 2.0);
    double R = m.surface().R();
    double w = m.eta() * R;

    // along the wind: v = X + unit theta direction
    auto v0 = unit_vector_at_angle(m, 0.0, 0.0, 0.0);
    CHECK(v0.vs == doctest::Approx(0.0));
    CHECK(v0.vtheta == doctest::Approx((w + 1.0) / R).epsilon(1e-12));
    CHECK(finsler_norm(m, v0) == doctest::Approx(1.0).epsilon(1e-12));

    // at phi_max the residual v - X is h-orthogonal to the wind
    double phi0 = phi_max(m, 0.0);
    CHECK(phi0 == doctest::Approx(std::atan2(1.0, w)).epsilon(1e-15));
    auto vt = unit_vector_at_angle(m, 0.0, 0.0, phi0);
    double ip = R * R * (vt.vtheta - m.eta()) * m.eta();  // h(v - X, X)
    CHECK(std::fabs(ip) < 1e-10);
    CHECK(finsler_norm(m, vt) == doctest::Approx(1.0).epsilon(1e-12));

    // intermediate angles: F-unit and at the requested h-angle from d_theta
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> up(0.0, 1.0), us(-0.6, 0.6);
    for (int i = 0; i < 200; ++i) {
        double s = us(rng) * m.surface().L();
        double phi = up(rng) * phi_max(m, s);
        auto v = unit_vector_at_angle(m, s, 0.3, phi);
        CHECK(finsler_norm(m, v) == doctest::Approx(1.0).epsilon(1e-12));
        double rho = m.surface().rho(s);
        double cosang = rho * v.vtheta / h_norm(m, v);
        CHECK(std::acos(std::clamp(cosang, -1.0, 1.0)) == doctest::Approx(phi).epsilon(1e-9));
        CHECK(v.vs >= 0.0);
    }

    // no wind: h-unit vector at angle phi, phi_max = pi/2
    auto m0 = make_randers(round_surface(), 1.0);
    CHECK(phi_max(m0, 0.0) == doctest::Approx(M_PI / 2).epsilon(1e-15));
    auto u = unit_vector_at_angle(m0, 0.0, 0.0, 0.4);
    CHECK(u.vs == doctest::Approx(std::sin(0.4)).epsilon(1e-12));
    CHECK(u.vtheta == doctest::Approx(std::cos(0.4) / m0.surface().rho(0.0)).epsilon(1e-12));

    CHECK_THROWS_AS(unit_vector_at_angle(m, 0.0, 0.0, -0.1), RangeError);
    CHECK_THROWS_AS(unit_vector_at_angle(m, 0.0, 0.0, phi0 + 0.1), RangeError);
}
