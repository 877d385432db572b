#include "kschem/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "kschem/errors.hpp"

namespace kschem {

Outcome classify_lambda(const ModelParams& p, double lambda, const ProfileControls& c) {
    try {
        return integrate_profile(p, lambda, c).outcome;
    } catch (const StepUnderflow& e) {
        return e.growing() ? Outcome::BlowUp : Outcome::TouchZero;
    }
}

bool small_side(const ModelParams& p, Outcome o) {
    return below_boundary(p) ? o == Outcome::TouchZero : o == Outcome::Global;
}

namespace {

ProfileSolution profile_or_empty(const ModelParams& p, double lambda, const ProfileControls& c) {
    try {
        return integrate_profile(p, lambda, c);
    } catch (const StepUnderflow& e) {
        ProfileSolution s;
        s.params = p;
        s.lambda = lambda;
        s.outcome = e.growing() ? Outcome::BlowUp : Outcome::TouchZero;
        s.radius = e.radius();
        s.controls = c;
        return s;
    }
}

void require_threshold(const ModelParams& p) {
    if (!(p.q > 1.0))
        throw NoCriticalValue("q = 1: every lambda gives a global profile, no critical value exists");
}

}  // namespace

CriticalResult find_critical_lambda(const ModelParams& p, std::pair<double, double> bracket0,
                                    const CriticalControls& c) {
    require_threshold(p);
    auto [lo, hi] = bracket0;
    if (!(lo >= 0.0 && hi > lo && std::isfinite(hi))) throw InvalidBracket("need 0 <= lo < hi");

    CriticalResult res;
    res.controls = c;
    auto f_lo = std::async(std::launch::async, [&] { return profile_or_empty(p, lo, c.profile); });
    ProfileSolution s_hi = profile_or_empty(p, hi, c.profile);
    ProfileSolution s_lo = f_lo.get();
    res.trace.push_back({lo, s_lo.outcome});
    res.trace.push_back({hi, s_hi.outcome});

    const bool lo_small = small_side(p, s_lo.outcome);
    const bool hi_small = small_side(p, s_hi.outcome);
    if (lo_small == hi_small)
        throw InvalidBracket("bracket endpoints give " + to_string(s_lo.outcome) + " and " +
                             to_string(s_hi.outcome) + "; they must straddle the threshold");
    if (!lo_small) throw InvalidBracket("bracket is reversed: lo is on the large-lambda side");
    if (!below_boundary(p) && s_hi.outcome != Outcome::BlowUp)
        throw InvalidBracket("hi endpoint must blow up for kappa >= -N/2");

    std::size_t it = 0;
    while (hi - lo > c.tol_rel * 0.5 * (lo + hi)) {
        if (it >= c.max_iter) throw MaxIterExceeded("bisection did not reach tol_rel within max_iter");
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ProfileSolution s = profile_or_empty(p, mid, c.profile);
        res.trace.push_back({mid, s.outcome});
        if (small_side(p, s.outcome)) {
            lo = mid;
            s_lo = std::move(s);
        } else {
            hi = mid;
            s_hi = std::move(s);
        }
        ++it;
    }
    res.lambda_star = 0.5 * (lo + hi);
    res.bracket = {lo, hi};
    res.outcome_lo = s_lo.outcome;
    res.outcome_hi = s_hi.outcome;
    res.iterations = it;
    res.profile_lo = std::move(s_lo);
    res.profile_hi = std::move(s_hi);
    return res;
}

std::pair<double, double> expand_bracket(const ModelParams& p, std::pair<double, double> guess,
                                         const ProfileControls& c) {
    require_threshold(p);
    auto [lo, hi] = guess;
    if (!(lo > 0.0 && hi > lo)) throw InvalidBracket("need 0 < lo < hi");
    const double cap = std::ldexp(lo, 40);
    while (small_side(p, classify_lambda(p, hi, c))) {
        if (hi >= cap) throw InvalidBracket("no large-lambda outcome found up to 2^40 * lo");
        lo = hi;
        hi = std::min(2.0 * hi, cap);
    }
    const double floor_lo = std::ldexp(guess.first, -60);
    while (!small_side(p, classify_lambda(p, lo, c))) {
        if (lo <= floor_lo) throw InvalidBracket("no small-lambda outcome found while halving lo");
        hi = lo;
        lo *= 0.5;
    }
    return {lo, hi};
}

bool trace_monotone(const ModelParams& p, const std::vector<BisectionSample>& trace) {
    for (const auto& a : trace)
        for (const auto& b : trace)
            if (a.lambda < b.lambda && !small_side(p, a.outcome) && small_side(p, b.outcome)) return false;
    return true;
}

}  // namespace kschem
