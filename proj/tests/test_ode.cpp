#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flab/ode.hpp"

using namespace flab;

TEST_CASE("adaptive integration reaches stated tolerance on a stiff-free problem") {
    // y'' = -y, energy preserved; integrated as first-order system
    auto rhs = [](double, const std::array<double, 2>& y, std::array<double, 2>& d) {
        d[0] = y[1];
        d[1] = -y[0];
    };
    OdeOptions opt;
    auto res = integrate<2>(rhs, {1.0, 0.0}, 0.0, 20.0, opt);
    CHECK(res.stop == OdeStop::horizon);
    CHECK(res.y_end()[0] == doctest::Approx(std::cos(20.0)).epsilon(1e-9));
    CHECK(res.y_end()[1] == doctest::Approx(-std::sin(20.0)).epsilon(1e-9));
}

TEST_CASE("hermite interpolation of the stored trajectory is dense-output accurate") {
    auto rhs = [](double, const std::array<double, 1>& y, std::array<double, 1>& d) { d[0] = y[0]; };
    // Cubic Hermite error is O(h^4/384 f''''), so cap the step to keep it below 1e-9.
    OdeOptions opt;
    opt.dt_max = 0.01;
    auto res = integrate<1>(rhs, {1.0}, 0.0, 2.0, opt);
    for (double t = 0.1; t < 2.0; t += 0.23) {
        CHECK(res.at(t)[0] == doctest::Approx(std::exp(t)).epsilon(1e-9));
        CHECK(res.deriv_at(t)[0] == doctest::Approx(std::exp(t)).epsilon(1e-7));
    }
}

TEST_CASE("event localization finds a sign change to high accuracy") {
    auto rhs = [](double, const std::array<double, 2>& y, std::array<double, 2>& d) {
        d[0] = y[1];
        d[1] = -y[0];
    };
    EventSpec<2> ev;
    ev.fn = [](double, const std::array<double, 2>& y) { return y[0]; };
    ev.direction = -1;
    ev.t_min = 1e-3;
    // sin(t) starts at 0 going up; first downward zero at t = pi
    auto res = integrate<2>(rhs, {0.0, 1.0}, 0.0, 10.0, {}, &ev);
    REQUIRE(res.stop == OdeStop::event);
    CHECK(res.t_end() == doctest::Approx(M_PI).epsilon(1e-10));
    CHECK(std::abs(res.y_end()[0]) < 1e-10);
}

TEST_CASE("event direction filter skips crossings of the wrong sign") {
    auto rhs = [](double, const std::array<double, 2>& y, std::array<double, 2>& d) {
        d[0] = y[1];
        d[1] = -y[0];
    };
    EventSpec<2> ev;
    ev.fn = [](double, const std::array<double, 2>& y) { return y[0]; };
    ev.direction = +1;  // only - -> + crossings; first is at t = 2 pi
    ev.t_min = 1e-3;
    auto res = integrate<2>(rhs, {0.0, 1.0}, 0.0, 10.0, {}, &ev);
    REQUIRE(res.stop == OdeStop::event);
    CHECK(res.t_end() == doctest::Approx(2 * M_PI).epsilon(1e-10));
}

TEST_CASE("guard stops integration") {
    auto rhs = [](double, const std::array<double, 1>& y, std::array<double, 1>& d) { d[0] = y[0]; };
    auto guard = [](double, const std::array<double, 1>& y) { return y[0] > 10.0; };
    auto res = integrate<1>(rhs, {1.0}, 0.0, 100.0, {}, nullptr, guard);
    CHECK(res.stop == OdeStop::guard);
    CHECK(res.t_end() < std::log(10.0) + 0.1);
}

TEST_CASE("poststep renormalization keeps a state on the circle") {
    auto rhs = [](double, const std::array<double, 2>& y, std::array<double, 2>& d) {
        d[0] = -y[1];
        d[1] = y[0];
    };
    auto renorm = [](double, std::array<double, 2>& y) {
        double n = std::sqrt(y[0] * y[0] + y[1] * y[1]);
        y[0] /= n;
        y[1] /= n;
    };
    auto res = integrate<2>(rhs, {1.0, 0.0}, 0.0, 200.0, {}, nullptr, nullptr, renorm);
    double n = std::sqrt(res.y_end()[0] * res.y_end()[0] + res.y_end()[1] * res.y_end()[1]);
    CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
}
