#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "kschem/ode.hpp"

namespace kschem {

struct CriticalControls {
    double tol_rel = 1e-10;
    std::size_t max_iter = 200;
    ProfileControls profile;
};

struct BisectionSample {
    double lambda;
    Outcome outcome;
};

struct CriticalResult {
    double lambda_star = 0.0;
    std::pair<double, double> bracket;
    Outcome outcome_lo = Outcome::Global;
    Outcome outcome_hi = Outcome::BlowUp;
    std::size_t iterations = 0;
    std::vector<BisectionSample> trace;  // every classification, in evaluation order
    ProfileSolution profile_lo;
    ProfileSolution profile_hi;
    CriticalControls controls;
};

// A StepUnderflow is mapped to the outcome its last trusted state points to.
Outcome classify_lambda(const ModelParams& p, double lambda, const ProfileControls& c = {});

// True when the outcome lies on the small-lambda side of the threshold being searched.
// For kappa >= -N/2 that side is {Global}; below the boundary it is {TouchZero}.
bool small_side(const ModelParams& p, Outcome o);

CriticalResult find_critical_lambda(const ModelParams& p, std::pair<double, double> bracket0,
                                    const CriticalControls& c = {});

// Doubles hi (up to 2^40 lo) and halves lo until the endpoints straddle the threshold.
std::pair<double, double> expand_bracket(const ModelParams& p, std::pair<double, double> guess,
                                         const ProfileControls& c = {});

// Checks that along the trace a larger lambda never lands on the small side when a smaller one did not.
bool trace_monotone(const ModelParams& p, const std::vector<BisectionSample>& trace);

}  // namespace kschem
