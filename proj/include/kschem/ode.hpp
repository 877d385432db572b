#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kschem/model.hpp"

namespace kschem {

struct ProfileControls {
    double r_max = 40.0;
    double abs_tol = 1e-15;
    double rel_tol = 1e-11;
    double phi_ceiling = 1e10;
    double phi_floor = 1e-12;
    double r0 = 1e-6;
    double h_init = 1e-4;
    double overflow = 1e100;  // unconfirmed growth past this is a failure
};

enum class Outcome { Global, BlowUp, TouchZero };

std::string to_string(Outcome o);

// phi'' from the explicit form of the profile equation. Throws DomainError for phi <= 0.
double rhs(double r, double phi, double dphi, const ModelParams& p, double lambda);

struct TaylorStart {
    double phi;
    double dphi;
    double truncation_bound;  // size of the neglected r^4 term, estimated
};

TaylorStart taylor_start(const ModelParams& p, double lambda, double r0);

struct ProfileValue {
    double phi;
    double dphi;
    double ddphi;
};

struct ProfileSolution {
    ModelParams params;
    double lambda = 0.0;
    std::vector<double> r;
    std::vector<double> phi;
    std::vector<double> dphi;
    std::vector<double> ddphi;  // may be empty for synthetic grids (cubic Hermite is used then)
    Outcome outcome = Outcome::Global;
    double radius = 0.0;  // r_max for Global, estimated singular radius otherwise
    ProfileControls controls;

    double r_end() const { return r.back(); }
    // Interpolated value on [0, r_end]; the Taylor polynomial is used below r[0].
    ProfileValue eval(double x) const;
};

ProfileSolution integrate_profile(const ModelParams& p, double lambda, const ProfileControls& c = {});

std::vector<double> theta_view(const ProfileSolution& sol);
double theta_inverse(const ModelParams& p, double r, double theta);
std::vector<double> g_view(const ProfileSolution& sol, double eta);

// Header r,phi,dphi,theta,g_eta; 17 significant digits.
void write_profile_csv(std::ostream& os, const ProfileSolution& sol, double eta);

}  // namespace kschem
