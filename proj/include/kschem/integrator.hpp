#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

// Dormand–Prince 5(4) embedded pair with the Hairer 4th-order dense output.
// The right-hand side has the form bool f(double r, const State& y, State& dy);
// returning false marks y as outside the domain and forces a step rejection.

namespace kschem::dp5 {

template <std::size_t M>
using State = std::array<double, M>;

namespace coef {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace coef

template <std::size_t M>
struct Step {
    double r0 = 0.0;
    double h = 0.0;
    State<M> y0{}, y1{};
    State<M> k1{}, k7{};  // derivatives at both ends (FSAL)
    std::array<State<M>, 5> rc{};

    State<M> dense(double r) const {
        const double th = (r - r0) / h;
        const double th1 = 1.0 - th;
        State<M> out;
        for (std::size_t i = 0; i < M; ++i)
            out[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
        return out;
    }
};

enum class Attempt { Ok, Domain };

struct Tolerance {
    double rel;
    double abs;
};

// One trial step. On Ok, `err` holds the scaled RMS error estimate (accept iff err <= 1).
template <std::size_t M, class F>
Attempt attempt(F& f, double r, const State<M>& y, const State<M>& k1, double h, const Tolerance& tol,
                Step<M>& out, double& err) {
    using namespace coef;
    State<M> k2, k3, k4, k5, k6, k7, w;
    auto stage = [&](auto&& combine, double rr, State<M>& k) {
        for (std::size_t i = 0; i < M; ++i) w[i] = y[i] + h * combine(i);
        return f(rr, w, k);
    };
    if (!stage([&](std::size_t i) { return a21 * k1[i]; }, r + c2 * h, k2)) return Attempt::Domain;
    if (!stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }, r + c3 * h, k3))
        return Attempt::Domain;
    if (!stage([&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; }, r + c4 * h, k4))
        return Attempt::Domain;
    if (!stage([&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; },
               r + c5 * h, k5))
        return Attempt::Domain;
    if (!stage([&](std::size_t i) {
            return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
        },
               r + h, k6))
        return Attempt::Domain;
    State<M> y1;
    for (std::size_t i = 0; i < M; ++i)
        y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    if (!f(r + h, y1, k7)) return Attempt::Domain;

    double acc = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(y1[i]));
        acc += (e / sc) * (e / sc);
    }
    err = std::sqrt(acc / M);
    if (!std::isfinite(err)) return Attempt::Domain;

    out.r0 = r;
    out.h = h;
    out.y0 = y;
    out.y1 = y1;
    out.k1 = k1;
    out.k7 = k7;
    for (std::size_t i = 0; i < M; ++i) {
        const double dy = y1[i] - y[i];
        const double bspl = h * k1[i] - dy;
        out.rc[0][i] = y[i];
        out.rc[1][i] = dy;
        out.rc[2][i] = bspl;
        out.rc[3][i] = dy - h * k7[i] - bspl;
        out.rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    return Attempt::Ok;
}

// Standard step-size update; no growth right after a rejection.
inline double next_h(double h, double err, bool after_reject) {
    double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    fac = std::clamp(fac, 0.2, after_reject ? 1.0 : 5.0);
    return h * fac;
}

// First root of g(dense(r)) on [step.r0, step.r0 + h], given sign change between the ends.
template <std::size_t M, class G>
double locate(const Step<M>& s, G&& g) {
    double a = s.r0, b = s.r0 + s.h;
    double ga = g(s.y0);
    for (int it = 0; it < 200 && b - a > 4e-16 * std::abs(b); ++it) {
        const double m = 0.5 * (a + b);
        const double gm = g(s.dense(m));
        if ((gm > 0) == (ga > 0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace kschem::dp5
