#include "kschem/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "kschem/errors.hpp"

namespace kschem {

AsymptoticFit fit_rate(const ProfileSolution& sol, const FitControls& c) {
    if (sol.outcome != Outcome::Global) throw NotGlobal("rate fit needs a Global profile");
    const double re = sol.r_end();
    const double ra = c.window_lo * re, rb = c.window_hi * re;
    const double k2 = 2.0 * sol.params.kappa;

    std::vector<double> xs;
    for (std::size_t i = 0; i <= c.samples; ++i) xs.push_back(ra + (rb - ra) * i / c.samples);
    for (double x : sol.r)
        if (x > ra && x < rb) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> lg(xs.size()), dg(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const ProfileValue v = sol.eval(xs[i]);
        if (!(v.phi > 0.0)) throw NotGlobal("profile not positive in the fit window");
        lg[i] = std::log(v.phi) - k2 * std::log(xs[i]);
        dg[i] = v.dphi - k2 * v.phi / xs[i];  // sign of g'
    }
    // Trapezoid mean of log g in r: node-density independent geometric mean.
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) acc += 0.5 * (lg[i] + lg[i + 1]) * (xs[i + 1] - xs[i]);
    AsymptoticFit fit;
    fit.M_star = std::exp(acc / (xs.back() - xs.front()));
    fit.window = {ra, rb};
    fit.g_min = std::exp(*std::min_element(lg.begin(), lg.end()));
    fit.g_max = std::exp(*std::max_element(lg.begin(), lg.end()));
    fit.plateau_defect = std::max(std::abs(fit.g_max / fit.M_star - 1.0), std::abs(fit.g_min / fit.M_star - 1.0));
    int last = 0;
    for (double d : dg) {
        const int s = (d > 0) - (d < 0);
        if (s != 0 && last != 0 && s != last) ++fit.dg_sign_changes;
        if (s != 0) last = s;
    }
    fit.converged = fit.plateau_defect < c.threshold && rb / ra >= 1.5 - 1e-12;
    return fit;
}

DecayCheck weighted_decay_check(const ProfileSolution& sol, double trust_floor) {
    const auto& p = sol.params;
    double r_trust = sol.r_end();
    for (std::size_t i = 0; i < sol.r.size(); ++i)
        if (sol.phi[i] < trust_floor) {
            r_trust = sol.r[i];
            break;
        }
    DecayCheck out;
    out.window = {0.6 * r_trust, 0.9 * r_trust};
    const std::size_t n = 200;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = out.window.first + (out.window.second - out.window.first) * i / n;
        const double ph = sol.eval(x).phi;
        if (!(ph > 0.0)) throw DomainError("decay metric needs phi > 0");
        out.r.push_back(x);
        out.metric.push_back(std::log(ph) + 0.5 * (p.N - 1) * std::log(x) + x * x / (8.0 * p.Dv));
    }
    out.monotone_decreasing = true;
    for (std::size_t i = 1; i < out.metric.size(); ++i)
        if (!(out.metric[i] < out.metric[i - 1])) out.monotone_decreasing = false;
    return out;
}

std::pair<ProfileSolution, AsymptoticFit> solve_with_rate(const ModelParams& p, double lambda,
                                                          const ProfileControls& c, double r_extended,
                                                          const FitControls& fc) {
    ProfileSolution sol = integrate_profile(p, lambda, c);
    AsymptoticFit fit = fit_rate(sol, fc);
    if (!fit.converged && c.r_max < r_extended) {
        ProfileControls c2 = c;
        c2.r_max = r_extended;
        sol = integrate_profile(p, lambda, c2);
        fit = fit_rate(sol, fc);
    }
    return {std::move(sol), fit};
}

}  // namespace kschem
