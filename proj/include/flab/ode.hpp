#pragma once

// Adaptive explicit integration with event detection.
//
// The stepper is an order 7(8) embedded Runge-Kutta pair driven through a
// manual accept/reject loop so we can record every accepted step, watch sign
// changes of an event function, and stop on guard predicates.  Events are
// localized by re-integrating from the last accepted sample, so the reported
// event time is accurate to the integration tolerance rather than to the
// interpolation order.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "flab/errors.hpp"

namespace flab {

struct OdeOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double dt_init = 1e-4;
    double dt_max = 0.05;  // also bounds the spacing of stored samples
    long max_steps = 8000000;
};

template <std::size_t N>
struct EventSpec {
    std::function<double(double, const std::array<double, N>&)> fn;
    int direction = 0;    // -1: trigger on + -> -,  +1: on - -> +,  0: any sign change
    double t_min = 0.0;   // crossings before this time are ignored
};

enum class OdeStop { horizon, event, guard };

template <std::size_t N>
struct OdeResult {
    std::vector<double> t;
    std::vector<std::array<double, N>> y;
    std::vector<std::array<double, N>> dy;
    OdeStop stop = OdeStop::horizon;

    double t_end() const { return t.back(); }
    const std::array<double, N>& y_end() const { return y.back(); }
    std::size_t size() const { return t.size(); }

    // cubic Hermite interpolation between stored samples
    std::array<double, N> at(double tq) const { return interp(tq, false); }
    std::array<double, N> deriv_at(double tq) const { return interp(tq, true); }

  private:
    std::array<double, N> interp(double tq, bool want_deriv) const {
        if (t.empty()) throw NumericsError("OdeResult::at: empty trajectory");
        if (tq <= t.front()) return want_deriv ? dy.front() : y.front();
        if (tq >= t.back()) return want_deriv ? dy.back() : y.back();
        std::size_t lo = 0, hi = t.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (t[mid] <= tq ? lo : hi) = mid;
        }
        double h = t[hi] - t[lo];
        double u = (tq - t[lo]) / h;
        std::array<double, N> r{};
        if (!want_deriv) {
            double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
            double h10 = u * (1 - u) * (1 - u);
            double h01 = u * u * (3 - 2 * u);
            double h11 = u * u * (u - 1);
            for (std::size_t i = 0; i < N; ++i)
                r[i] = h00 * y[lo][i] + h10 * h * dy[lo][i] + h01 * y[hi][i] + h11 * h * dy[hi][i];
        } else {
            double d00 = 6 * u * (u - 1) / h;
            double d10 = (1 - u) * (1 - 3 * u);
            double d01 = -6 * u * (u - 1) / h;
            double d11 = u * (3 * u - 2);
            for (std::size_t i = 0; i < N; ++i)
                r[i] = d00 * y[lo][i] + d10 * dy[lo][i] + d01 * y[hi][i] + d11 * dy[hi][i];
        }
        return r;
    }
};

namespace detail {

template <std::size_t N, class RHS>
auto wrap_system(RHS& rhs) {
    return [&rhs](const std::array<double, N>& x, std::array<double, N>& dxdt, double tt) { rhs(tt, x, dxdt); };
}

// Integrate from (t0, y0) to t1 without recording; used for event refinement.
template <std::size_t N, class RHS>
std::array<double, N> advance(RHS& rhs, std::array<double, N> y, double t0, double t1, const OdeOptions& opt) {
    namespace od = boost::numeric::odeint;
    if (t1 <= t0) return y;
    auto stepper = od::make_controlled(opt.abs_tol, opt.rel_tol,
                                       od::runge_kutta_fehlberg78<std::array<double, N>>());
    auto sys = wrap_system<N>(rhs);
    double t = t0;
    double dt = std::min({opt.dt_init, opt.dt_max, t1 - t0});
    long steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) throw NumericsError("ode advance: step limit exceeded");
        if (t + dt > t1) dt = t1 - t;
        if (od::controlled_step_result::fail == stepper.try_step(sys, y, t, dt)) {
            if (dt < 1e-15) throw NumericsError("ode advance: step size underflow");
            continue;
        }
        dt = std::min(dt, opt.dt_max);
    }
    return y;
}

}  // namespace detail

// Integrate y' = rhs(t, y) on [t0, t1].  The optional event stops integration
// at a localized sign change; the optional guard stops it as soon as the
// predicate holds; poststep (if given) is applied to the state after every
// accepted step (used to renormalize states that live on a sphere).
template <std::size_t N, class RHS>
OdeResult<N> integrate(RHS&& rhs, std::array<double, N> y0, double t0, double t1, const OdeOptions& opt = {},
                       const EventSpec<N>* event = nullptr,
                       const std::function<bool(double, const std::array<double, N>&)>& guard = nullptr,
                       const std::function<void(double, std::array<double, N>&)>& poststep = nullptr) {
    namespace od = boost::numeric::odeint;
    if (!(t1 > t0)) throw ConfigError("ode integrate: need t1 > t0");

    OdeResult<N> res;
    auto record = [&](double t, const std::array<double, N>& y) {
        std::array<double, N> d{};
        rhs(t, y, d);
        res.t.push_back(t);
        res.y.push_back(y);
        res.dy.push_back(d);
    };

    auto stepper = od::make_controlled(opt.abs_tol, opt.rel_tol,
                                       od::runge_kutta_fehlberg78<std::array<double, N>>());
    auto sys = detail::wrap_system<N>(rhs);

    std::array<double, N> y = y0;
    double t = t0;
    record(t, y);

    // event bookkeeping: previous sample at which the event sign was valid
    bool have_ref = false;
    double ref_t = 0, ref_g = 0;
    std::array<double, N> ref_y{};
    if (event && t >= event->t_min) {
        ref_g = event->fn(t, y);
        if (ref_g != 0) {
            have_ref = true;
            ref_t = t;
            ref_y = y;
        }
    }

    double dt = std::min(opt.dt_init, opt.dt_max);
    long steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) throw NumericsError("ode integrate: step limit exceeded");
        if (t + dt > t1) dt = t1 - t;
        if (od::controlled_step_result::fail == stepper.try_step(sys, y, t, dt)) {
            if (dt < 1e-15) throw NumericsError("ode integrate: step size underflow");
            continue;
        }
        if (poststep) poststep(t, y);
        record(t, y);
        dt = std::min(dt, opt.dt_max);

        if (event && t >= event->t_min) {
            double g = event->fn(t, y);
            bool crossed = false;
            if (have_ref && ref_g * g < 0) {
                crossed = (event->direction == 0) || (event->direction < 0 && g < 0) ||
                          (event->direction > 0 && g > 0);
            }
            if (crossed) {
                // refine on [ref_t, t] by secant with bisection fallback,
                // re-integrating from the bracket start for every probe
                double ta = ref_t, tb = t;
                double ga = ref_g, gb = g;
                std::array<double, N> ya = ref_y, yb = y;
                bool done = false;
                double tev = tb;
                std::array<double, N> yev = yb;
                for (int it = 0; it < 90 && !done && tb - ta > 1e-12 * std::max(1.0, std::abs(tb)); ++it) {
                    double tc = ta - ga * (tb - ta) / (gb - ga);
                    double margin = 0.05 * (tb - ta);
                    if (!(tc > ta + margin && tc < tb - margin)) tc = 0.5 * (ta + tb);
                    std::array<double, N> yc = detail::advance<N>(rhs, ya, ta, tc, opt);
                    if (poststep) poststep(tc, yc);
                    double gc = event->fn(tc, yc);
                    if (gc == 0) {
                        tev = tc;
                        yev = yc;
                        done = true;
                    } else if (ga * gc < 0) {
                        tb = tc;
                        gb = gc;
                        yb = yc;
                    } else {
                        ta = tc;
                        ga = gc;
                        ya = yc;
                    }
                }
                if (!done) {
                    bool left = std::abs(ga) < std::abs(gb);
                    tev = left ? ta : tb;
                    yev = left ? ya : yb;
                }
                // truncate the recorded trajectory to the event time
                while (!res.t.empty() && res.t.back() > tev) {
                    res.t.pop_back();
                    res.y.pop_back();
                    res.dy.pop_back();
                }
                record(tev, yev);
                res.stop = OdeStop::event;
                return res;
            }
            if (g != 0) {
                have_ref = true;
                ref_t = t;
                ref_g = g;
                ref_y = y;
            }
        }

        if (guard && guard(t, y)) {
            res.stop = OdeStop::guard;
            return res;
        }
    }
    res.stop = OdeStop::horizon;
    return res;
}

}  // namespace flab
