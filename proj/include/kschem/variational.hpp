#pragma once

#include <cstddef>
#include <vector>

#include "kschem/model.hpp"
#include "kschem/shooting.hpp"

namespace kschem {

// Throws WrongRegime unless kappa < -N/2, ExponentOutOfRange unless 1 < q < (N+2)/(N-2)_+.
void check_variational_regime(const ModelParams& p);

// Uniform radial grid on [0, R_cut] with the energies written in w = phi e^{r^2/(8Dv)}:
//   J = sum over cells (Dv/2) r_mid^{N-1} (dw)^2/h + (1/2) sum_i m_i V_i w_i^2,
//   V = r^2/(16 Dv) + N/4 + kappa,
//   H = 1/(q+1) sum_i m_i G_i |w_i|^{q+1},  G = exp(-r^2/(4Du) - (q-1) r^2/(8Dv)),
// m_i the trapezoid weights times r_i^{N-1}. The cross term of the phi-form was integrated by
// parts, so J equals (Dv/2) int rho phi'^2 + (kappa/2) int rho phi^2 up to the boundary term at R_cut.
class Discretization {
public:
    Discretization(const ModelParams& p, double R_cut, std::size_t nodes);

    std::size_t size() const { return r_.size(); }
    double h() const { return h_; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& mass_weights() const { return m_; }

    double J(const std::vector<double>& w) const;
    double H(const std::vector<double>& w) const;
    void grad_J(const std::vector<double>& w, std::vector<double>& g) const;
    void grad_H(const std::vector<double>& w, std::vector<double>& g) const;

    // Solves (Dv K + diag(m (V + shift))) z = b with the last node pinned to zero.
    void precondition(const std::vector<double>& b, std::vector<double>& z) const;
    // Newton step for grad_J + M grad_H = -rhs at w; returns false if the system is not positive.
    bool newton_solve(const std::vector<double>& w, double M, const std::vector<double>& rhs,
                      std::vector<double>& dw) const;

    double to_w(double r, double phi) const;
    double to_phi(double r, double w) const;
    const ModelParams& params() const { return p_; }

private:
    ModelParams p_;
    double h_;
    std::vector<double> r_, m_, k_, V_, G_;
    double shift_;
};

struct EnergyValues {
    double J;
    double H;
};

// phi sampled on a uniform grid starting at r = 0.
EnergyValues energy(const std::vector<double>& r, const std::vector<double>& phi, const ModelParams& p);

struct VariationalControls {
    double R_cut = 25.0;
    std::size_t nodes = 4000;
    double grad_tol = 1e-7;
    double stall_tol = 1e-5;  // a failed line search below this gradient counts as the roundoff floor
    std::size_t max_iter = 20000;
    double init_scale = 1.0;
    bool polish = true;
};

struct VariationalState {
    std::vector<double> r;
    std::vector<double> w;
    std::vector<double> phi_star;
    double J_val = 0.0;
    double H_val = 0.0;
    double M_star = 0.0;     // eigenfunction route
    double M_descent = 0.0;  // Lagrange multiplier of the descent
    double el_residual = 0.0;
    double R_cut = 0.0;
    std::size_t nodes = 0;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
    std::vector<double> J_history;  // J after every accepted descent step
};

VariationalState minimize_constrained(const ModelParams& p, const VariationalControls& c = {});

double multiplier_from_eigenfunction(const VariationalState& s, const ModelParams& p);

// Max of the 4th-order stencil defect of the Euler–Lagrange equation, relative to max |w|.
double el_residual(const VariationalState& s, const ModelParams& p, double M);

struct CrossCheck {
    double lambda_equiv;
    double mismatch;
};

CrossCheck cross_check_with_shooting(const VariationalState& s, const ModelParams& p, const CriticalResult& crit);

// Relative change of lambda_equiv when R_cut moves to alt_R_cut.
double r_cut_sensitivity(const ModelParams& p, const VariationalControls& c, double alt_R_cut = 35.0);

}  // namespace kschem
