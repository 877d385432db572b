#include "kschem/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kschem/errors.hpp"

namespace kschem {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Thomas algorithm; sub[i] couples i to i-1, sup[i] couples i to i+1.
bool tridiag(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup, std::vector<double> rhs,
             std::vector<double>& x) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) return false;
        const double f = sub[i] / diag[i - 1];
        diag[i] -= f * sup[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    x.assign(n, 0.0);
    if (diag[n - 1] == 0.0) return false;
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    for (double v : diag)
        if (!(v > 0.0)) return false;
    return true;
}

void normalize(const Discretization& d, std::vector<double>& w) {
    for (double& v : w) v = std::abs(v);
    w.back() = 0.0;
    const double H = d.H(w);
    const double s = std::pow(H, -1.0 / (d.params().q + 1.0));
    for (double& v : w) v *= s;
}

}  // namespace

void check_variational_regime(const ModelParams& p) {
    if (!below_boundary(p)) throw WrongRegime("variational problem needs kappa < -N/2");
    const double upper = p.N > 2 ? (p.N + 2.0) / (p.N - 2.0) : INFINITY;
    if (!(p.q > 1.0 && p.q < upper)) throw ExponentOutOfRange("need 1 < q < (N+2)/(N-2)_+");
}

Discretization::Discretization(const ModelParams& p, double R_cut, std::size_t nodes) : p_(p) {
    if (nodes < 8) throw InvalidParameter("need at least 8 nodes");
    if (!(R_cut > 0.0)) throw InvalidParameter("R_cut must be positive");
    const std::size_t n = nodes;
    h_ = R_cut / (n - 1);
    r_.resize(n);
    m_.resize(n);
    V_.resize(n);
    G_.resize(n);
    k_.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i + 1 == n) ? R_cut : h_ * i;
        r_[i] = r;
        const double wt = (i == 0 || i + 1 == n) ? 0.5 * h_ : h_;
        m_[i] = wt * std::pow(r, p.N - 1);
        V_[i] = r * r / (16.0 * p.Dv) + 0.25 * p.N + p.kappa;
        G_[i] = std::exp(-r * r / (4.0 * p.Du) - (p.q - 1.0) * r * r / (8.0 * p.Dv));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) k_[i] = std::pow(r_[i] + 0.5 * h_, p.N - 1) / h_;
    shift_ = 2.0 * std::abs(p.kappa) + 1.0;
}

double Discretization::J(const std::vector<double>& w) const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < r_.size(); ++i) {
        const double d = w[i + 1] - w[i];
        s += 0.5 * p_.Dv * k_[i] * d * d;
    }
    for (std::size_t i = 0; i < r_.size(); ++i) s += 0.5 * m_[i] * V_[i] * w[i] * w[i];
    return s;
}

double Discretization::H(const std::vector<double>& w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < r_.size(); ++i) s += m_[i] * G_[i] * std::pow(std::abs(w[i]), p_.q + 1.0);
    return s / (p_.q + 1.0);
}

void Discretization::grad_J(const std::vector<double>& w, std::vector<double>& g) const {
    const std::size_t n = r_.size();
    g.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) g[i] = m_[i] * V_[i] * w[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double f = p_.Dv * k_[i] * (w[i + 1] - w[i]);
        g[i] -= f;
        g[i + 1] += f;
    }
}

void Discretization::grad_H(const std::vector<double>& w, std::vector<double>& g) const {
    g.resize(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i)
        g[i] = m_[i] * G_[i] * std::pow(std::abs(w[i]), p_.q - 1.0) * w[i];
}

void Discretization::precondition(const std::vector<double>& b, std::vector<double>& z) const {
    const std::size_t n = r_.size();
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(b);
    for (std::size_t i = 0; i < n; ++i) diag[i] = m_[i] * (V_[i] + shift_);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double k = p_.Dv * k_[i];
        diag[i] += k;
        diag[i + 1] += k;
        sup[i] = -k;
        sub[i + 1] = -k;
    }
    diag[n - 1] = 1.0;
    sub[n - 1] = 0.0;
    sup[n - 2] = 0.0;
    rhs[n - 1] = 0.0;
    tridiag(sub, diag, sup, rhs, z);
}

bool Discretization::newton_solve(const std::vector<double>& w, double M, const std::vector<double>& rhs,
                                  std::vector<double>& dw) const {
    const std::size_t n = r_.size();
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), b(rhs);
    for (std::size_t i = 0; i < n; ++i)
        diag[i] = m_[i] * (V_[i] + M * p_.q * G_[i] * std::pow(std::abs(w[i]), p_.q - 1.0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double k = p_.Dv * k_[i];
        diag[i] += k;
        diag[i + 1] += k;
        sup[i] = -k;
        sub[i + 1] = -k;
    }
    diag[n - 1] = 1.0;
    sub[n - 1] = 0.0;
    sup[n - 2] = 0.0;
    b[n - 1] = 0.0;
    return tridiag(sub, diag, sup, b, dw);
}

double Discretization::to_w(double r, double phi) const { return phi * std::exp(r * r / (8.0 * p_.Dv)); }
double Discretization::to_phi(double r, double w) const { return w * std::exp(-r * r / (8.0 * p_.Dv)); }

EnergyValues energy(const std::vector<double>& r, const std::vector<double>& phi, const ModelParams& p) {
    check_variational_regime(p);
    if (r.size() != phi.size() || r.size() < 8) throw InvalidParameter("grid and values must match, >= 8 nodes");
    if (r.front() != 0.0) throw InvalidParameter("grid must start at r = 0");
    const Discretization d(p, r.back(), r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        if (std::abs(r[i] - d.r()[i]) > 1e-9 * d.h()) throw InvalidParameter("grid must be uniform");
    std::vector<double> w(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = d.to_w(r[i], phi[i]);
    return {d.J(w), d.H(w)};
}

double multiplier_from_eigenfunction(const VariationalState& s, const ModelParams& p) {
    // Tested against phi0 = e^{-r^2/(4Dv)}; in w-variables the rho weight reduces to r^{N-1}.
    double num = 0.0, den = 0.0;
    const std::size_t n = s.r.size();
    if (n < 2) throw InvalidParameter("empty state");
    const double h = s.r[1] - s.r[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.r[i];
        const double m = ((i == 0 || i + 1 == n) ? 0.5 * h : h) * std::pow(r, p.N - 1);
        num += m * s.w[i] * std::exp(-r * r / (8.0 * p.Dv));
        den += m * std::exp(-r * r / (4.0 * p.Du) - p.q * r * r / (8.0 * p.Dv)) * std::pow(std::abs(s.w[i]), p.q);
    }
    if (!(den > 1e-300)) throw DegenerateDenominator("q-weighted integral vanishes");
    return -(0.5 * p.N + p.kappa) * num / den;
}

double el_residual(const VariationalState& s, const ModelParams& p, double M) {
    const std::size_t n = s.r.size();
    const double h = s.r[1] - s.r[0];
    const auto& w = s.w;
    double worst = 0.0, scale = 0.0;
    for (double v : w) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double r = s.r[i];
        const double d1 = (-w[i + 2] + 8.0 * w[i + 1] - 8.0 * w[i - 1] + w[i - 2]) / (12.0 * h);
        const double d2 = (-w[i + 2] + 16.0 * w[i + 1] - 30.0 * w[i] + 16.0 * w[i - 1] - w[i - 2]) / (12.0 * h * h);
        const double V = r * r / (16.0 * p.Dv) + 0.25 * p.N + p.kappa;
        const double G = std::exp(-r * r / (4.0 * p.Du) - (p.q - 1.0) * r * r / (8.0 * p.Dv));
        const double res = -p.Dv * d2 - p.Dv * (p.N - 1) / r * d1 + V * w[i] +
                           M * G * std::pow(std::abs(w[i]), p.q - 1.0) * w[i];
        worst = std::max(worst, std::abs(res));
    }
    return worst / scale;
}

VariationalState minimize_constrained(const ModelParams& p, const VariationalControls& c) {
    check_variational_regime(p);
    const Discretization d(p, c.R_cut, c.nodes);
    const std::size_t n = d.size();
    const auto& r = d.r();

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c.init_scale * (1.0 + r[i]) * std::exp(-r[i] * r[i] / (8.0 * p.Dv));
    normalize(d, w);

    VariationalState st;
    std::vector<double> gJ, gH, zJ, zH, dir(n), trial(n);
    double Jw = d.J(w);
    double step = 1.0, mu = 0.0, gnorm = INFINITY;
    std::size_t it = 0;
    bool done = false;
    for (; it < c.max_iter; ++it) {
        d.grad_J(w, gJ);
        d.grad_H(w, gH);
        gJ.back() = 0.0;
        gH.back() = 0.0;
        d.precondition(gJ, zJ);
        d.precondition(gH, zH);
        mu = dot(zJ, gH) / dot(zH, gH);
        for (std::size_t i = 0; i < n; ++i) dir[i] = zJ[i] - mu * zH[i];
        double pn = 0.0;
        for (std::size_t i = 0; i < n; ++i) pn += dir[i] * (gJ[i] - mu * gH[i]);
        gnorm = std::sqrt(std::max(pn, 0.0));
        if (gnorm < c.grad_tol) {
            done = true;
            break;
        }
        step = std::min(1.0, 2.0 * step);
        bool accepted = false;
        for (int k = 0; k < 60; ++k, step *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] - step * dir[i];
            normalize(d, trial);
            const double Jt = d.J(trial);
            if (Jt < Jw) {
                w.swap(trial);
                Jw = Jt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (gnorm < c.stall_tol) {
                done = true;
                break;
            }
            throw NotConverged("line search failed", gnorm, it);
        }
        st.J_history.push_back(Jw);
    }
    if (!done) throw NotConverged("projected gradient did not converge within max_iter", gnorm, it);

    double M = -mu;
    if (c.polish) {
        // Newton on grad_J + M grad_H = 0 at fixed M, then rescale back onto H = 1.
        std::vector<double> wn = w, F(n), dw;
        bool ok = true;
        double prev = INFINITY;
        for (int k = 0; k < 30 && ok; ++k) {
            d.grad_J(wn, gJ);
            d.grad_H(wn, gH);
            double fn = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                F[i] = -(gJ[i] + M * gH[i]);
                fn = std::max(fn, std::abs(F[i]));
            }
            F.back() = 0.0;
            if (fn < 1e-15 * d.h()) break;
            if (!(fn < prev)) {
                ok = k > 2;
                break;
            }
            prev = fn;
            ok = d.newton_solve(wn, M, F, dw);
            if (ok)
                for (std::size_t i = 0; i < n; ++i) wn[i] += dw[i];
        }
        if (ok && *std::min_element(wn.begin(), wn.end() - 1) > -1e-12) {
            for (double& v : wn) v = std::abs(v);
            wn.back() = 0.0;
            const double s = std::pow(d.H(wn), -1.0 / (p.q + 1.0));
            for (double& v : wn) v *= s;
            M *= std::pow(s, 1.0 - p.q);
            w.swap(wn);
            Jw = d.J(w);
        }
    }

    st.r = r;
    st.w = w;
    st.phi_star.resize(n);
    for (std::size_t i = 0; i < n; ++i) st.phi_star[i] = d.to_phi(r[i], w[i]);
    st.J_val = Jw;
    st.H_val = d.H(w);
    st.M_descent = M;
    st.R_cut = c.R_cut;
    st.nodes = n;
    st.iterations = it;
    st.gradient_norm = gnorm;
    st.M_star = multiplier_from_eigenfunction(st, p);
    st.el_residual = el_residual(st, p, st.M_star);
    return st;
}

CrossCheck cross_check_with_shooting(const VariationalState& s, const ModelParams& p, const CriticalResult& crit) {
    if (s.phi_star.empty()) throw InvalidParameter("empty state");
    const double le = s.M_star * std::pow(s.phi_star.front(), p.q - 1.0);
    return {le, std::abs(le - crit.lambda_star) / crit.lambda_star};
}

double r_cut_sensitivity(const ModelParams& p, const VariationalControls& c, double alt_R_cut) {
    VariationalControls c2 = c;
    c2.R_cut = alt_R_cut;
    c2.nodes = static_cast<std::size_t>(std::llround((c.nodes - 1) * alt_R_cut / c.R_cut)) + 1;
    const VariationalState a = minimize_constrained(p, c), b = minimize_constrained(p, c2);
    const double la = a.M_star * std::pow(a.phi_star.front(), p.q - 1.0);
    const double lb = b.M_star * std::pow(b.phi_star.front(), p.q - 1.0);
    return std::abs(lb - la) / std::abs(la);
}

}  // namespace kschem
