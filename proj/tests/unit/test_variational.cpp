#include <cmath>
#include <random>

#include "doctest.h"
#include "kschem/errors.hpp"
#include "kschem/shooting.hpp"
#include "kschem/variational.hpp"

using namespace kschem;

namespace {
ModelParams n1() { return ModelParams::make(1, 1, 1, 1, 1.5); }  // kappa = -1, q = 2.5

std::vector<double> grid(double R, std::size_t n) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = R * i / (n - 1);
    return r;
}
}  // namespace

TEST_CASE("regime guards") {
    CHECK_THROWS_AS(check_variational_regime(ModelParams::make(1, 1, 1, 1, 2.0)), WrongRegime);
    CHECK_THROWS_AS(check_variational_regime(ModelParams::make(3, 1, 1, 1, 2.0 / 3.0)), WrongRegime);
    const ModelParams big = ModelParams::make(3, 1, 1, 4.2, 0.8);
    CHECK(big.q == doctest::Approx(5.0));
    CHECK_THROWS_AS(minimize_constrained(big), ExponentOutOfRange);
    CHECK_NOTHROW(check_variational_regime(ModelParams::make(3, 1, 1, 1.0, 0.8)));
}

TEST_CASE("energy of zero and of the gaussian") {
    const ModelParams p = n1();
    const auto r = grid(25.0, 20001);
    const EnergyValues z = energy(r, std::vector<double>(r.size(), 0.0), p);
    CHECK(z.J == 0.0);
    CHECK(z.H == 0.0);
    std::vector<double> g(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) g[i] = std::exp(-r[i] * r[i] / 4);
    // (1/2)(Dv I2/(4 Dv^2) + kappa I0) with I0 = sqrt(pi), I2 = 2 sqrt(pi)
    const EnergyValues e = energy(r, g, p);
    CHECK(e.J == doctest::Approx(-std::sqrt(M_PI) / 4).epsilon(1e-7));
    // H = 1/(q+1) int_0^inf e^{-(q+1) r^2/4} = 1/(q+1) (1/2) sqrt(4 pi/(q+1))
    CHECK(e.H == doctest::Approx(0.5 * std::sqrt(4 * M_PI / 3.5) / 3.5).epsilon(1e-7));
}

TEST_CASE("homogeneity") {
    const ModelParams p = n1();
    const auto r = grid(25.0, 2001);
    std::vector<double> f(r.size()), f2(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        f[i] = std::exp(-r[i] * r[i] / 3) * (1 + 0.3 * std::sin(r[i]));
        f2[i] = 2 * f[i];
    }
    const EnergyValues a = energy(r, f, p), b = energy(r, f2, p);
    CHECK(b.J == doctest::Approx(4 * a.J).epsilon(1e-13));
    CHECK(b.H == doctest::Approx(std::pow(2.0, p.q + 1) * a.H).epsilon(1e-13));
}

TEST_CASE("gradients match finite differences") {
    const ModelParams p = n1();
    const Discretization d(p, 25.0, 801);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> w(d.size()), dir(d.size()), gJ, gH, wp, wm;
    for (std::size_t i = 0; i < d.size(); ++i) w[i] = std::exp(-d.r()[i] * d.r()[i] / 20) * (1.2 + 0.1 * nd(rng));
    d.grad_J(w, gJ);
    d.grad_H(w, gH);
    for (int k = 0; k < 20; ++k) {
        for (auto& v : dir) v = nd(rng);
        double aJ = 0, aH = 0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            aJ += gJ[i] * dir[i];
            aH += gH[i] * dir[i];
        }
        const double eps = 1e-5;
        wp = w;
        wm = w;
        for (std::size_t i = 0; i < d.size(); ++i) {
            wp[i] += eps * dir[i];
            wm[i] -= eps * dir[i];
        }
        const double fJ = (d.J(wp) - d.J(wm)) / (2 * eps);
        const double fH = (d.H(wp) - d.H(wm)) / (2 * eps);
        CHECK(fJ == doctest::Approx(aJ).epsilon(1e-6));
        CHECK(fH == doctest::Approx(aH).epsilon(1e-6));
    }
}

TEST_CASE("minimizer N=1 alpha=1.5") {
    const ModelParams p = n1();
    const VariationalState s = minimize_constrained(p);
    CHECK(std::abs(s.H_val - 1) < 1e-8);
    CHECK(s.M_star > 0);
    CHECK(s.M_star == doctest::Approx(s.M_descent).epsilon(1e-3));
    CHECK(s.phi_star.front() > 0);
    for (double v : s.phi_star) CHECK(v >= 0);
    for (std::size_t i = 1; i < s.J_history.size(); ++i) CHECK(s.J_history[i] <= s.J_history[i - 1]);

    VariationalControls c2;
    c2.nodes = 2000;
    const VariationalState h = minimize_constrained(p, c2);
    CHECK(h.M_star == doctest::Approx(s.M_star).epsilon(1e-2));
    CHECK(h.el_residual / s.el_residual == doctest::Approx(4.0).epsilon(0.1));

    VariationalControls big;
    big.init_scale = 10.0;
    const VariationalState t = minimize_constrained(p, big);
    CHECK(t.M_star == doctest::Approx(s.M_star).epsilon(1e-6));
    CHECK(t.phi_star.front() == doctest::Approx(s.phi_star.front()).epsilon(1e-6));

    // minimizer decays against the weight on the trailing window
    double prev = INFINITY;
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        const double r = s.r[i];
        if (r < 0.6 * 25 || r > 0.9 * 25) continue;
        const double m = std::log(s.phi_star[i]) + r * r / 8;
        CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("multiplier degenerate and cross-check identity") {
    const ModelParams p = n1();
    VariationalState z;
    z.r = grid(25.0, 101);
    z.w.assign(101, 0.0);
    z.phi_star.assign(101, 0.0);
    CHECK_THROWS_AS(multiplier_from_eigenfunction(z, p), DegenerateDenominator);

    // shooting profile rescaled by s with multiplier lambda s^{1-q} gives back lambda
    CriticalResult crit;
    crit.lambda_star = 0.9366;
    VariationalState f;
    const double sc = 0.7;
    f.phi_star = {sc, sc * 0.9, 0.0};
    f.M_star = crit.lambda_star * std::pow(sc, 1 - p.q);
    const CrossCheck cc = cross_check_with_shooting(f, p, crit);
    CHECK(cc.mismatch < 1e-14);
}

TEST_CASE("cross-check against shooting") {
    const ModelParams p = n1();
    const VariationalState s = minimize_constrained(p);
    const CriticalResult crit = find_critical_lambda(p, {1e-3, 100.0});
    const CrossCheck cc = cross_check_with_shooting(s, p, crit);
    CHECK(cc.mismatch < 2e-2);
    CHECK(r_cut_sensitivity(p, VariationalControls{}) < 1e-3);
}
