#pragma once

#include <cstddef>
#include <vector>

#include "kschem/model.hpp"

namespace kschem {

// (w phi')' + lambda w phi = 0 on (0, R), w = r^{N-1} e^{delta r^2}, phi(0)=1, phi'(0)=0, phi(R)=0.
struct EigenProblem {
    int N = 1;
    double delta = 0.25;
    double R = 10.0;
};

struct EigenResult {
    double lambda = 0.0;
    double shift = 0.0;  // lambda - 2 N delta, resolved to full relative precision
    bool shift_underflow = false;
    std::size_t iterations = 0;
    std::vector<double> r;
    std::vector<double> phi;  // eigenfunction, phi(0) = 1
};

EigenResult principal_eigenvalue(const EigenProblem& prob, double tol_rel = 1e-12);

// phi'' given phi, phi' for the eigen equation at r > 0.
double eigen_rhs(int N, double delta, double lambda, double r, double phi, double dphi);

// Max normalized defect of phi = e^{-delta r^2}, lambda = 2 N delta on `samples` points of (0, r_hi].
double gaussian_eigen_residual(int N, double delta, double r_hi = 20.0, std::size_t samples = 2000);

struct BoundaryReport {
    double delta = 0.0;
    std::vector<double> R;
    std::vector<double> lambda;
    std::vector<double> shift;
    double limit = 0.0;         // closed form 2 N delta
    double extrapolated = 0.0;  // from the last two ladder points
    double scaled_limit = 0.0;  // Dv * limit, to be compared with N/2
    double boundary_kappa = 0.0;
    bool matches = false;
    bool below_boundary = false;  // params.kappa < -N/2
};

BoundaryReport regime_boundary_check(const ModelParams& p, const std::vector<double>& ladder = {5, 10, 20, 40});

}  // namespace kschem
