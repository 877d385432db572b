#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kschem/asymptotics.hpp"
#include "kschem/ode.hpp"

namespace kschem {

enum class TailKind { None, Power, Gaussian };

std::string to_string(TailKind k);

// Extension of phi beyond the integrated grid.
struct Tail {
    TailKind kind = TailKind::None;
    double r_end = 0.0;
    double coeff = 0.0;     // M* (Power) or phi(r_end) (Gaussian)
    double exponent = 0.0;  // 2 kappa (Power) or -2 kappa - N (Gaussian)
    double Dv = 1.0;

    double phi(double r) const;
    double dphi(double r) const;
    double ddphi(double r) const;
};

class SelfSimilarSolution {
public:
    // Enforces lambda = A B^{alpha-1} to relative 1e-12 and picks the tail policy.
    static SelfSimilarSolution make(ProfileSolution profile, double A, double B);

    const ProfileSolution& profile() const { return profile_; }
    const ModelParams& params() const { return profile_.params; }
    double A() const { return A_; }
    double B() const { return B_; }
    const Tail& tail() const { return tail_; }
    const std::optional<AsymptoticFit>& fit() const { return fit_; }
    bool fit_available() const { return fit_ && fit_->converged; }
    double time_exponent() const { return time_exponent_; }

    // Same profile and amplitudes, v rebuilt with t^{e} instead of t^{kappa}.
    SelfSimilarSolution with_time_exponent(double e) const;

    // Profile with tail extension; OutOfDomain past the grid when there is no tail.
    ProfileValue phi(double r) const;
    double u(double x, double t) const;
    double v(double x, double t) const;

private:
    ProfileSolution profile_;
    double A_ = 0.0, B_ = 0.0;
    Tail tail_;
    std::optional<AsymptoticFit> fit_;
    double time_exponent_ = 0.0;
};

std::pair<std::vector<double>, std::vector<double>> reconstruct(const SelfSimilarSolution& s, double t,
                                                                const std::vector<double>& x);

double mass(const SelfSimilarSolution& s);
// Fraction of the mass integral carried by the tail beyond the grid.
double tail_mass_fraction(const SelfSimilarSolution& s);
// p = +infinity allowed.
double lp_norm_constant(const SelfSimilarSolution& s, double p);

// Direct x-space quadrature of reconstruct at time t, rescaled by t^{N/2(1-1/p)}.
double mass_direct(const SelfSimilarSolution& s, double t);
double lp_norm_direct(const SelfSimilarSolution& s, double t, double p);

double very_singular_moment(const SelfSimilarSolution& s);

struct DeltaRow {
    double t;
    double value;
    double error;
};

std::vector<DeltaRow> delta_probe(const SelfSimilarSolution& s, const std::function<double(double)>& f,
                                  const std::vector<double>& t_ladder);

struct SingularityProbe {
    std::vector<double> t;
    std::vector<double> local_integrals;
    std::vector<double> local_p_integrals;  // empty unless -N/2 < kappa < 0
    double p = 0.0;
    std::vector<double> log_lower_bound;  // only at kappa = -N/2
    double R_bound = 0.0;
    std::string trend;    // for local_integrals: "diverging" or "bounded"
    std::string p_trend;  // for local_p_integrals
};

// p <= 0 picks N/(2|kappa|) + 1.
SingularityProbe v_singularity_probe(const SelfSimilarSolution& s, double epsilon, const std::vector<double>& t_ladder,
                                     double p = 0.0);

struct ResidualReport {
    double max_residual = 0.0;
    double u_residual = 0.0;
    double v_residual = 0.0;
    double worst_x = 0.0;
};

ResidualReport pde_residual(const SelfSimilarSolution& s, double t, const std::vector<double>& x, double h);

struct MassReport {
    double M = 0.0;
    std::map<double, double> Mp;
    std::optional<double> M1;
    double t_invariance_defect = 0.0;
    double tail_fraction = 0.0;
    TailKind tail = TailKind::None;
};

MassReport mass_report(const SelfSimilarSolution& s, const std::vector<double>& ps = {2.0, INFINITY},
                       const std::vector<double>& times = {0.25, 1.0, 4.0});

}  // namespace kschem
