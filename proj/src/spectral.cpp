#include "kschem/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kschem/errors.hpp"
#include "kschem/integrator.hpp"

namespace kschem {

namespace {

using S = dp5::State<2>;

struct GRun {
    bool hit_zero = false;
    double zero = 0.0;
    std::vector<double> r, g;
};

// g'' + ((N-1)/r - 2 delta r) g' + mu g = 0, the eigen equation after phi = e^{-delta r^2} g.
GRun shoot_g(int N, double delta, double mu, double R, bool keep) {
    auto f = [&](double r, const S& y, S& dy) {
        dy[0] = y[1];
        dy[1] = -((N - 1) / r - 2.0 * delta * r) * y[1] - mu * y[0];
        return std::isfinite(dy[1]);
    };
    const double r0 = std::min(1e-6, 1e-3 * R);
    double r = r0;
    S y{1.0 - mu * r0 * r0 / (2.0 * N), -mu * r0 / N}, k1;
    f(r, y, k1);
    GRun run;
    if (keep) {
        run.r.push_back(r);
        run.g.push_back(y[0]);
    }
    const dp5::Tolerance tol{1e-12, 1e-15};
    double h = std::min(1e-4, 1e-2 * R);
    bool rejected = false;
    dp5::Step<2> step;
    const double eps = std::numeric_limits<double>::epsilon();
    while (r < R) {
        h = std::min({h, 0.01 * (1.0 + r), R - r});
        if (h < 16.0 * eps * r) throw ToleranceNotReached("eigen shooting step collapsed");
        double err = 0.0;
        if (dp5::attempt<2>(f, r, y, k1, h, tol, step, err) != dp5::Attempt::Ok) {
            h *= 0.5;
            rejected = true;
            continue;
        }
        if (err > 1.0) {
            h = dp5::next_h(h, err, true);
            rejected = true;
            continue;
        }
        if (step.y1[0] <= 0.0) {
            run.hit_zero = true;
            run.zero = dp5::locate<2>(step, [](const S& s) { return s[0]; });
            if (keep) {
                run.r.push_back(run.zero);
                run.g.push_back(0.0);
            }
            return run;
        }
        r = (R - (r + h) < 4.0 * eps * R) ? R : r + h;
        y = step.y1;
        k1 = step.k7;
        if (keep) {
            run.r.push_back(r);
            run.g.push_back(y[0]);
        }
        h = dp5::next_h(h, err, rejected);
        rejected = false;
    }
    return run;
}

}  // namespace

double eigen_rhs(int N, double delta, double lambda, double r, double phi, double dphi) {
    return -((N - 1) / r + 2.0 * delta * r) * dphi - lambda * phi;
}

EigenResult principal_eigenvalue(const EigenProblem& prob, double tol_rel) {
    if (prob.N < 1) throw InvalidParameter("N must be >= 1");
    if (!(prob.delta > 0.0) || !std::isfinite(prob.delta)) throw InvalidParameter("delta must be positive");
    if (!(prob.R > 0.0) || !std::isfinite(prob.R)) throw InvalidParameter("R must be positive and finite");
    const double base = 2.0 * prob.N * prob.delta;
    auto vanishes = [&](double mu) { return shoot_g(prob.N, prob.delta, mu, prob.R, false).hit_zero; };

    double hi = 1.0;
    while (!vanishes(hi)) {
        hi *= 2.0;
        if (hi > 1e300) throw ToleranceNotReached("no zero found for any shift");
    }
    double lo = hi;
    constexpr double kTiny = 1e-300;
    EigenResult res;
    do {
        hi = lo;
        lo /= 1e4;
        if (lo < kTiny) {
            res.shift_underflow = true;
            lo = 0.0;
            break;
        }
    } while (vanishes(lo));

    if (!res.shift_underflow) {
        std::size_t it = 0;
        while (hi / lo - 1.0 > tol_rel) {
            if (++it > 400) throw ToleranceNotReached("eigenvalue bisection did not converge");
            const double mid = std::sqrt(lo) * std::sqrt(hi);  // lo * hi can underflow
            if (vanishes(mid))
                hi = mid;
            else
                lo = mid;
        }
        res.iterations = it;
    }
    const double mu = res.shift_underflow ? 0.0 : std::sqrt(lo) * std::sqrt(hi);
    res.shift = mu;
    res.lambda = base + mu;
    GRun run = shoot_g(prob.N, prob.delta, res.shift_underflow ? hi : mu, prob.R, true);
    res.r = std::move(run.r);
    res.phi.resize(run.g.size());
    for (std::size_t i = 0; i < res.r.size(); ++i)
        res.phi[i] = std::exp(-prob.delta * res.r[i] * res.r[i]) * std::max(run.g[i], 0.0);
    return res;
}

double gaussian_eigen_residual(int N, double delta, double r_hi, std::size_t samples) {
    const double lambda = 2.0 * N * delta;
    double worst = 0.0;
    for (std::size_t i = 1; i <= samples; ++i) {
        const double r = r_hi * i / samples;
        const double phi = std::exp(-delta * r * r);
        const double dphi = -2.0 * delta * r * phi;
        const double ddphi = (4.0 * delta * delta * r * r - 2.0 * delta) * phi;
        const double scale = std::max({std::abs(ddphi), std::abs(((N - 1) / r + 2.0 * delta * r) * dphi),
                                       std::abs(lambda * phi)});
        if (scale == 0.0) continue;
        worst = std::max(worst, std::abs(ddphi - eigen_rhs(N, delta, lambda, r, phi, dphi)) / scale);
    }
    return worst;
}

BoundaryReport regime_boundary_check(const ModelParams& p, const std::vector<double>& ladder) {
    BoundaryReport rep;
    rep.delta = 1.0 / (4.0 * p.Dv);
    rep.limit = 2.0 * p.N * rep.delta;
    rep.scaled_limit = p.Dv * rep.limit;
    rep.boundary_kappa = -0.5 * p.N;
    rep.below_boundary = below_boundary(p);
    for (double R : ladder) {
        const EigenResult e = principal_eigenvalue({p.N, rep.delta, R});
        rep.R.push_back(R);
        rep.lambda.push_back(e.lambda);
        rep.shift.push_back(e.shift);
    }
    rep.extrapolated = rep.lambda.empty() ? rep.limit : rep.lambda.back();
    const std::size_t n = rep.R.size();
    if (n >= 2 && rep.shift[n - 2] > 0.0) {
        // shift ~ C R^N e^{-delta R^2}: fix C on the second-to-last rung, subtract the model on the last.
        auto model = [&](double R) { return std::pow(R, p.N) * std::exp(-rep.delta * R * R); };
        const double C = rep.shift[n - 2] / model(rep.R[n - 2]);
        rep.extrapolated = rep.lambda[n - 1] - C * model(rep.R[n - 1]);
    }
    rep.matches = std::abs(rep.scaled_limit - 0.5 * p.N) <= 1e-14 * p.N &&
                  std::abs(p.Dv * rep.extrapolated - 0.5 * p.N) < 1e-6;
    return rep;
}

}  // namespace kschem
