#include "kschem/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "kschem/errors.hpp"
#include "kschem/integrator.hpp"

namespace kschem {

namespace {

constexpr double kFlushExponent = -700.0;

// lambda * phi^q * exp(-r^2/(4Du)) evaluated in log space.
double forcing(double r, double phi, const ModelParams& p, double lambda) {
    if (lambda == 0.0) return 0.0;
    const double e = p.q * std::log(phi) - r * r / (4.0 * p.Du);
    if (e < kFlushExponent) return 0.0;
    return lambda * std::exp(e);
}

double rhs_unchecked(double r, double phi, double dphi, const ModelParams& p, double lambda) {
    const double drift = 0.5 * r + p.Dv * (p.N - 1) / r;
    return (p.kappa * phi - drift * dphi + forcing(r, phi, p, lambda)) / p.Dv;
}

}  // namespace

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Global: return "Global";
        case Outcome::BlowUp: return "BlowUp";
        case Outcome::TouchZero: return "TouchZero";
    }
    return "";
}

double rhs(double r, double phi, double dphi, const ModelParams& p, double lambda) {
    if (!(phi > 0.0)) throw DomainError("rhs requires phi > 0");
    if (!(r > 0.0)) throw DomainError("rhs requires r > 0");
    return rhs_unchecked(r, phi, dphi, p, lambda);
}

TaylorStart taylor_start(const ModelParams& p, double lambda, double r0) {
    const double c = (p.kappa + lambda) / (p.N * p.Dv);
    const double a = 0.5 * c;
    const double b = (p.kappa * a + lambda * (p.q * a - 1.0 / (4.0 * p.Du)) - a) / (p.Dv * (4.0 * p.N + 8.0));
    return {1.0 + 0.5 * c * r0 * r0, c * r0, std::abs(b) * std::pow(r0, 4)};
}

ProfileValue ProfileSolution::eval(double x) const {
    if (x < 0.0 || x > r.back() * (1.0 + 1e-15)) throw OutOfDomain("radius outside the profile grid");
    if (x <= r.front()) {
        const double c = (params.kappa + lambda) / (params.N * params.Dv);
        if (x == r.front()) return {phi.front(), dphi.front(), ddphi.empty() ? c : ddphi.front()};
        return {1.0 + 0.5 * c * x * x, c * x, c};
    }
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t i = (it == r.end()) ? r.size() - 2 : static_cast<std::size_t>(it - r.begin()) - 1;
    const double h = r[i + 1] - r[i];
    const double t = (x - r[i]) / h;
    const double f0 = phi[i], df = phi[i + 1] - phi[i], d0 = dphi[i], d1 = dphi[i + 1];
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    if (ddphi.empty()) {
        // Value basis in difference form (h00 = 1 - h01) so constant data is reproduced exactly.
        const double h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        const double g10 = 3 * t2 - 4 * t + 1, g01 = -6 * t2 + 6 * t, g11 = 3 * t2 - 2 * t;
        const double s10 = 6 * t - 4, s01 = -12 * t + 6, s11 = 6 * t - 2;
        return {f0 + df * h01 + h * (d0 * h10 + d1 * h11), df * g01 / h + d0 * g10 + d1 * g11,
                df * s01 / (h * h) + (d0 * s10 + d1 * s11) / h};
    }
    const double s0 = ddphi[i], s1 = ddphi[i + 1];
    const double H1 = t - 6 * t3 + 8 * t4 - 3 * t5,
                 H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5, H3 = 0.5 * t3 - t4 + 0.5 * t5,
                 H4 = -4 * t3 + 7 * t4 - 3 * t5, H5 = 10 * t3 - 15 * t4 + 6 * t5;
    const double G1 = 1 - 18 * t2 + 32 * t3 - 15 * t4,
                 G2 = t - 4.5 * t2 + 6 * t3 - 2.5 * t4, G3 = 1.5 * t2 - 4 * t3 + 2.5 * t4,
                 G4 = -12 * t2 + 28 * t3 - 15 * t4, G5 = 30 * t2 - 60 * t3 + 30 * t4;
    const double S1 = -36 * t + 96 * t2 - 60 * t3,
                 S2 = 1 - 9 * t + 18 * t2 - 10 * t3, S3 = 3 * t - 12 * t2 + 10 * t3,
                 S4 = -24 * t + 84 * t2 - 60 * t3, S5 = 60 * t - 180 * t2 + 120 * t3;
    const double hh = h * h;
    return {f0 + df * H5 + h * (d0 * H1 + d1 * H4) + hh * (s0 * H2 + s1 * H3),
            df * G5 / h + d0 * G1 + d1 * G4 + h * (s0 * G2 + s1 * G3),
            df * S5 / hh + (d0 * S1 + d1 * S4) / h + s0 * S2 + s1 * S3};
}

ProfileSolution integrate_profile(const ModelParams& p, double lambda, const ProfileControls& c) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidParameter("lambda must be finite and >= 0");
    if (!(c.r_max > c.r0) || !(c.r0 > 0.0)) throw InvalidParameter("need 0 < r0 < r_max");
    if (!(c.phi_ceiling > 1.0 && c.phi_floor < 1.0 && c.phi_floor > 0.0))
        throw InvalidParameter("need ceiling > 1 > floor > 0");
    if (!(c.rel_tol > 0.0 && c.abs_tol > 0.0)) throw InvalidParameter("tolerances must be positive");

    using S = dp5::State<2>;
    auto f = [&](double r, const S& y, S& dy) {
        if (!(y[0] > 0.0)) return false;
        dy[0] = y[1];
        dy[1] = rhs_unchecked(r, y[0], y[1], p, lambda);
        return std::isfinite(dy[1]);
    };

    ProfileSolution sol;
    sol.params = p;
    sol.lambda = lambda;
    sol.controls = c;

    const TaylorStart ts = taylor_start(p, lambda, c.r0);
    double r = c.r0;
    S y{ts.phi, ts.dphi}, k1;
    f(r, y, k1);
    auto push = [&](double rr, const S& yy, const S& kk) {
        sol.r.push_back(rr);
        sol.phi.push_back(yy[0]);
        sol.dphi.push_back(yy[1]);
        sol.ddphi.push_back(kk[1]);
    };
    push(r, y, k1);

    const dp5::Tolerance tol{c.rel_tol, c.abs_tol};
    const double eps = std::numeric_limits<double>::epsilon();
    double h = std::min(c.h_init, c.r_max - r);
    bool rejected = false;
    int confirmed = 0;
    dp5::Step<2> step;

    while (r < c.r_max) {
        h = std::min({h, 0.01 * (1.0 + r), c.r_max - r});
        if (h < 16.0 * eps * r)
            throw StepUnderflow("adaptive step collapsed at r = " + std::to_string(r), r, y[1] > 0.0);
        double err = 0.0;
        const auto res = dp5::attempt<2>(f, r, y, k1, h, tol, step, err);
        if (res == dp5::Attempt::Domain) {
            h *= 0.5;
            rejected = true;
            continue;
        }
        if (err > 1.0) {
            h = dp5::next_h(h, err, true);
            rejected = true;
            continue;
        }
        const double r_new = (c.r_max - (r + h) < 4.0 * eps * c.r_max) ? c.r_max : r + h;
        r = r_new;
        y = step.y1;
        k1 = step.k7;
        push(r, y, k1);

        if (y[0] <= c.phi_floor && y[1] < 0.0) {
            const double rc = dp5::locate<2>(step, [&](const S& s) { return s[0] - c.phi_floor; });
            const S z = step.dense(rc);
            sol.outcome = Outcome::TouchZero;
            sol.radius = rc + z[0] / std::abs(z[1]);
            return sol;
        }
        if (y[0] >= c.phi_ceiling && y[1] > 0.0) {
            // Escape test: forcing dominates, Dv phi'' >= (1/4) lambda e^{-r^2/4Du} phi^q with q > 1.
            const bool escape = p.q > 1.0 && p.Dv * k1[1] >= 0.25 * forcing(r, y[0], p, lambda) &&
                                forcing(r, y[0], p, lambda) > 0.0;
            confirmed = escape ? confirmed + 1 : 0;
            if (confirmed >= 2) {
                sol.outcome = Outcome::BlowUp;
                sol.radius = r + 2.0 * y[0] / ((p.q - 1.0) * y[1]);
                return sol;
            }
        } else {
            confirmed = 0;
        }
        if (y[0] > c.overflow)
            throw StepUnderflow("profile exceeded the representable range without confirmed blow-up", r, true);
        h = dp5::next_h(h, err, rejected);
        rejected = false;
    }
    sol.outcome = Outcome::Global;
    sol.radius = c.r_max;
    return sol;
}

std::vector<double> theta_view(const ProfileSolution& sol) {
    if (!sol.params.sigma) throw TransformUndefined("sigma is undefined for q = 1");
    const double s = *sol.params.sigma;
    std::vector<double> out(sol.r.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sol.phi[i] * std::exp(-s * sol.r[i] * sol.r[i]);
    return out;
}

double theta_inverse(const ModelParams& p, double r, double theta) {
    if (!p.sigma) throw TransformUndefined("sigma is undefined for q = 1");
    return theta * std::exp(*p.sigma * r * r);
}

std::vector<double> g_view(const ProfileSolution& sol, double eta) {
    std::vector<double> out(sol.r.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(sol.r[i] > 0.0)) throw DomainError("g_view requires r > 0");
        out[i] = sol.phi[i] * std::pow(sol.r[i], -eta);
    }
    return out;
}

void write_profile_csv(std::ostream& os, const ProfileSolution& sol, double eta) {
    std::vector<double> theta;
    if (sol.params.sigma) theta = theta_view(sol);
    const std::vector<double> g = g_view(sol, eta);
    os << "r,phi,dphi,theta,g_eta\n";
    char buf[160];
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
        const double th = theta.empty() ? std::numeric_limits<double>::quiet_NaN() : theta[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", sol.r[i], sol.phi[i], sol.dphi[i], th,
                      g[i]);
        os << buf;
    }
}

}  // namespace kschem
