#pragma once

#include <utility>
#include <vector>

#include "kschem/ode.hpp"

namespace kschem {

struct AsymptoticFit {
    double M_star = 0.0;
    std::pair<double, double> window;
    double plateau_defect = 0.0;
    bool converged = false;
    double g_min = 0.0;  // C1 in C1 r^{2k} <= phi <= C2 r^{2k} on the window
    double g_max = 0.0;  // C2
    int dg_sign_changes = 0;
};

struct FitControls {
    double window_lo = 0.6;
    double window_hi = 0.9;
    double threshold = 1e-2;
    std::size_t samples = 400;  // uniform samples of g inside the window besides the nodes
};

AsymptoticFit fit_rate(const ProfileSolution& sol, const FitControls& c = {});

struct DecayCheck {
    std::vector<double> r;
    std::vector<double> metric;  // log phi + (1/2) log rho
    bool monotone_decreasing = false;
    std::pair<double, double> window;
};

// Trailing window of the trusted segment (phi above trust_floor).
DecayCheck weighted_decay_check(const ProfileSolution& sol, double trust_floor = 1e-8);

// Integrates, fits, and re-integrates once to r_extended if the plateau is not converged.
std::pair<ProfileSolution, AsymptoticFit> solve_with_rate(const ModelParams& p, double lambda,
                                                          const ProfileControls& c = {},
                                                          double r_extended = 80.0,
                                                          const FitControls& fc = {});

}  // namespace kschem
