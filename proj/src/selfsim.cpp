#include "kschem/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kschem/errors.hpp"
#include "kschem/quadrature.hpp"

namespace kschem {

namespace {

constexpr double kCutExponent = 750.0;
constexpr double kQuadTol = 1e-13;

// Upper radius for integrands carrying e^{-rate r^2}; clipped to the grid when there is no tail.
double radial_limit(const SelfSimilarSolution& s, double rate) {
    const double ru = std::sqrt(kCutExponent / rate);
    if (s.tail().kind == TailKind::None) return std::min(ru, s.profile().r_end());
    return ru;
}

// Integral of f(r) over [a, b], split at r_end so the tail kink does not hurt the adaptivity.
template <class F>
double integrate_r(const SelfSimilarSolution& s, F&& f, double a, double b) {
    if (b <= a) return 0.0;
    const double re = s.profile().r_end();
    double total = 0.0;
    const double m = std::min(b, re);
    if (m > a) {
        // Fixed breakpoints keep panel counts modest on long grids.
        const int pieces = 8;
        for (int i = 0; i < pieces; ++i) {
            const double lo = a + (m - a) * i / pieces, hi = a + (m - a) * (i + 1) / pieces;
            total += quad::integrate(f, lo, hi, kQuadTol, 1e-300).value;
        }
    }
    if (b > re) total += quad::integrate(f, std::max(a, re), b, kQuadTol, 1e-300).value;
    return total;
}

double ex(const SelfSimilarSolution& s) { return s.params().chi / s.params().Du; }

// phi^a e^{-rate r^2} r^{N-1} in log space.
double weighted(const SelfSimilarSolution& s, double r, double a, double rate) {
    const double ph = s.phi(r).phi;
    if (ph <= 0.0) return 0.0;
    double e = a * std::log(ph) - rate * r * r;
    if (s.params().N > 1) {
        if (r == 0.0) return 0.0;
        e += (s.params().N - 1) * std::log(r);
    }
    return std::exp(e);
}

// Maximizer of a unimodal-near-the-peak function by node scan plus golden section.
template <class F>
double sup_over(const std::vector<double>& grid, F&& f) {
    std::size_t best = 0;
    double fb = f(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double v = f(grid[i]);
        if (v > fb) {
            fb = v;
            best = i;
        }
    }
    double a = grid[best > 0 ? best - 1 : 0], b = grid[std::min(best + 1, grid.size() - 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (f(c) >= f(d))
            b = d;
        else
            a = c;
    }
    return std::max(fb, f(0.5 * (a + b)));
}

std::vector<double> scan_grid(const SelfSimilarSolution& s, double upper) {
    std::vector<double> g{0.0};
    for (double r : s.profile().r)
        if (r <= upper) g.push_back(r);
    const double re = s.profile().r_end();
    for (int i = 1; i <= 200 && upper > re; ++i) g.push_back(re + (upper - re) * i / 200.0);
    return g;
}

}  // namespace

std::string to_string(TailKind k) {
    switch (k) {
        case TailKind::None: return "none";
        case TailKind::Power: return "power";
        case TailKind::Gaussian: return "gaussian";
    }
    return "";
}

double Tail::phi(double r) const {
    switch (kind) {
        case TailKind::Power: return coeff * std::pow(r, exponent);
        case TailKind::Gaussian:
            return coeff * std::pow(r / r_end, exponent) * std::exp(-(r * r - r_end * r_end) / (4.0 * Dv));
        case TailKind::None: break;
    }
    throw OutOfDomain("no tail extension available");
}

double Tail::dphi(double r) const {
    if (kind == TailKind::Power) return coeff * exponent * std::pow(r, exponent - 1.0);
    return phi(r) * (exponent / r - r / (2.0 * Dv));
}

double Tail::ddphi(double r) const {
    if (kind == TailKind::Power) return coeff * exponent * (exponent - 1.0) * std::pow(r, exponent - 2.0);
    const double L = exponent / r - r / (2.0 * Dv);
    return phi(r) * (L * L - exponent / (r * r) - 1.0 / (2.0 * Dv));
}

SelfSimilarSolution SelfSimilarSolution::make(ProfileSolution profile, double A, double B) {
    if (!(A >= 0.0) || !(B > 0.0) || !std::isfinite(A) || !std::isfinite(B))
        throw InvalidParameter("need A >= 0 and B > 0");
    const ModelParams& p = profile.params;
    const double lam = A * std::pow(B, p.alpha - 1.0);
    if (std::abs(lam - profile.lambda) > 1e-12 * std::max(std::abs(profile.lambda), 1e-300) &&
        !(lam == 0.0 && profile.lambda == 0.0))
        throw InconsistentAmplitudes("A B^{alpha-1} does not match the profile lambda");
    SelfSimilarSolution s;
    s.A_ = A;
    s.B_ = B;
    s.time_exponent_ = p.kappa;
    s.tail_.r_end = profile.r_end();
    s.tail_.Dv = p.Dv;
    if (profile.outcome == Outcome::Global) {
        if (below_boundary(p)) {
            s.tail_.kind = TailKind::Gaussian;
            s.tail_.coeff = profile.phi.back();
            s.tail_.exponent = -2.0 * p.kappa - p.N;
        } else {
            s.fit_ = fit_rate(profile);
            if (s.fit_->converged) {
                s.tail_.kind = TailKind::Power;
                s.tail_.coeff = s.fit_->M_star;
                s.tail_.exponent = 2.0 * p.kappa;
            }
        }
    }
    s.profile_ = std::move(profile);
    return s;
}

SelfSimilarSolution SelfSimilarSolution::with_time_exponent(double e) const {
    SelfSimilarSolution s = *this;
    s.time_exponent_ = e;
    return s;
}

ProfileValue SelfSimilarSolution::phi(double r) const {
    r = std::abs(r);
    if (r <= profile_.r_end()) return profile_.eval(r);
    return {tail_.phi(r), tail_.dphi(r), tail_.ddphi(r)};
}

double SelfSimilarSolution::u(double x, double t) const {
    if (!(t > 0.0)) throw InvalidParameter("t must be positive");
    const ModelParams& p = params();
    const double r = std::abs(x) / std::sqrt(t);
    if (A_ == 0.0) return 0.0;
    const double ph = phi(r).phi;
    return A_ * std::exp(-0.5 * p.N * std::log(t) + (p.chi / p.Du) * std::log(ph) - r * r / (4.0 * p.Du));
}

double SelfSimilarSolution::v(double x, double t) const {
    if (!(t > 0.0)) throw InvalidParameter("t must be positive");
    const double r = std::abs(x) / std::sqrt(t);
    return B_ * std::pow(t, time_exponent_) * phi(r).phi;
}

std::pair<std::vector<double>, std::vector<double>> reconstruct(const SelfSimilarSolution& s, double t,
                                                                const std::vector<double>& x) {
    if (!(t > 0.0)) throw InvalidParameter("t must be positive");
    std::vector<double> u(x.size()), v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        u[i] = s.u(x[i], t);
        v[i] = s.v(x[i], t);
    }
    return {u, v};
}

double mass(const SelfSimilarSolution& s) {
    if (s.A() == 0.0) return 0.0;
    const double rate = 1.0 / (4.0 * s.params().Du);
    const double I = integrate_r(s, [&](double r) { return weighted(s, r, ex(s), rate); }, 0.0, radial_limit(s, rate));
    return s.A() * sphere_area(s.params().N) * I;
}

double tail_mass_fraction(const SelfSimilarSolution& s) {
    const double rate = 1.0 / (4.0 * s.params().Du);
    const double lim = radial_limit(s, rate), re = s.profile().r_end();
    if (lim <= re || s.A() == 0.0) return 0.0;
    auto f = [&](double r) { return weighted(s, r, ex(s), rate); };
    const double tail = quad::integrate(f, re, lim, kQuadTol, 1e-300).value;
    return tail / integrate_r(s, f, 0.0, lim);
}

double lp_norm_constant(const SelfSimilarSolution& s, double p) {
    if (!(p > 1.0)) throw InvalidParameter("p must lie in (1, inf]");
    const double a = ex(s);
    const double rate = 1.0 / (4.0 * s.params().Du);
    if (std::isinf(p)) {
        const double lim = radial_limit(s, rate);
        auto f = [&](double r) {
            const double ph = s.phi(r).phi;
            return std::exp(a * std::log(ph) - rate * r * r);
        };
        return s.A() * sup_over(scan_grid(s, lim), f);
    }
    const double I =
        integrate_r(s, [&](double r) { return weighted(s, r, p * a, p * rate); }, 0.0, radial_limit(s, p * rate));
    return s.A() * std::pow(sphere_area(s.params().N) * I, 1.0 / p);
}

double mass_direct(const SelfSimilarSolution& s, double t) {
    const double rate = 1.0 / (4.0 * s.params().Du);
    const double xl = std::sqrt(t) * radial_limit(s, rate);
    const int N = s.params().N;
    auto f = [&](double x) { return std::pow(x, N - 1) * s.u(x, t); };
    double total = 0.0;
    for (int i = 0; i < 16; ++i) total += quad::integrate(f, xl * i / 16, xl * (i + 1) / 16, kQuadTol, 1e-300).value;
    return sphere_area(N) * total;
}

double lp_norm_direct(const SelfSimilarSolution& s, double t, double p) {
    if (!(p > 1.0)) throw InvalidParameter("p must lie in (1, inf]");
    const int N = s.params().N;
    const double rate = 1.0 / (4.0 * s.params().Du);
    if (std::isinf(p)) {
        std::vector<double> g = scan_grid(s, radial_limit(s, rate));
        for (double& x : g) x *= std::sqrt(t);
        return std::pow(t, 0.5 * N) * sup_over(g, [&](double x) { return s.u(x, t); });
    }
    const double xl = std::sqrt(t) * radial_limit(s, p * rate);
    auto f = [&](double x) { return std::pow(x, N - 1) * std::pow(s.u(x, t), p); };
    double total = 0.0;
    for (int i = 0; i < 16; ++i) total += quad::integrate(f, xl * i / 16, xl * (i + 1) / 16, kQuadTol, 1e-300).value;
    return std::pow(t, 0.5 * N * (1.0 - 1.0 / p)) * std::pow(sphere_area(N) * total, 1.0 / p);
}

double very_singular_moment(const SelfSimilarSolution& s) {
    const ModelParams& p = s.params();
    if (!below_boundary(p)) throw WrongRegime("very-singular moment needs kappa < -N/2");
    if (s.profile().outcome != Outcome::Global) throw NotGlobal("very-singular moment needs a Global profile");
    if (!weighted_decay_check(s.profile()).monotone_decreasing)
        throw WrongRegime("profile does not show the weighted decay signature");
    const double e = -2.0 * p.kappa - 1.0;
    const double re = s.profile().r_end();
    const double lim = std::sqrt(re * re + 4.0 * p.Dv * kCutExponent);
    auto f = [&](double r) {
        if (r == 0.0) return 0.0;
        return std::pow(r, e) * s.phi(r).phi;
    };
    return s.B() * sphere_area(p.N) * integrate_r(s, f, 0.0, lim);
}

std::vector<DeltaRow> delta_probe(const SelfSimilarSolution& s, const std::function<double(double)>& f,
                                  const std::vector<double>& t_ladder) {
    const double M = mass(s);
    const double rate = 1.0 / (4.0 * s.params().Du);
    const double lim = radial_limit(s, rate);
    std::vector<DeltaRow> rows;
    for (double t : t_ladder) {
        if (!(t > 0.0)) throw InvalidParameter("t must be positive");
        const double st = std::sqrt(t);
        const double I =
            integrate_r(s, [&](double r) { return weighted(s, r, ex(s), rate) * f(st * r); }, 0.0, lim);
        const double val = s.A() * sphere_area(s.params().N) * I;
        rows.push_back({t, val, std::abs(val - M * f(0.0))});
    }
    return rows;
}

namespace {

// Integral of phi^p r^{N-1} over [0, b] with analytic power tail.
double local_integral(const SelfSimilarSolution& s, double b, double p) {
    const int N = s.params().N;
    const double re = s.profile().r_end();
    auto f = [&](double r) {
        if (N > 1 && r == 0.0) return 0.0;
        return std::pow(s.phi(r).phi, p) * std::pow(r, N - 1);
    };
    double total = integrate_r(s, f, 0.0, std::min(b, re));
    if (b <= re) return total;
    const Tail& tl = s.tail();
    if (tl.kind == TailKind::None) throw OutOfDomain("local integral extends past the grid without a tail");
    if (tl.kind == TailKind::Power) {
        const double e = p * tl.exponent + N;
        const double C = std::pow(tl.coeff, p);
        total += (std::abs(e) < 1e-12) ? C * std::log(b / re) : C * (std::pow(b, e) - std::pow(re, e)) / e;
    } else {
        const double lim = std::min(b, std::sqrt(re * re + 4.0 * s.params().Dv * kCutExponent / p));
        total += quad::integrate(f, re, lim, kQuadTol, 1e-300).value;
    }
    return total;
}

// Divergence is judged by the growth per unit ln(1/t): it stays level (logarithmic) or grows (power)
// for a diverging quantity and decays geometrically when the values settle on a finite limit.
std::string trend_of(const std::vector<double>& t, const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return "bounded";
    if (v.size() < 3) return "diverging";
    auto rate = [&](std::size_t i) { return (v[i] - v[i - 1]) / std::log(t[i - 1] / t[i]); };
    return rate(v.size() - 1) >= 0.9 * rate(v.size() - 2) ? "diverging" : "bounded";
}

}  // namespace

SingularityProbe v_singularity_probe(const SelfSimilarSolution& s, double epsilon, const std::vector<double>& t_ladder,
                                     double p) {
    const ModelParams& pr = s.params();
    const VClass cls = classify_v(pr.N, pr.alpha, pr.kappa).tag;
    if (cls == VClass::Regular) throw WrongRegime("singularity probe needs kappa < 0");
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    const double area = sphere_area(pr.N);
    SingularityProbe out;
    const bool less = cls == VClass::LessSingular;
    if (less) out.p = p > 0.0 ? p : pr.N / (2.0 * std::abs(pr.kappa)) + 1.0;
    const bool boundary = cls == VClass::VerySingular && !below_boundary(pr);
    if (boundary) {
        if (!s.fit_available()) throw NotGlobal("boundary probe needs a converged rate fit");
        const double M = s.fit()->M_star;
        const auto& r = s.profile().r;
        const auto& ph = s.profile().phi;
        std::size_t k = r.size();
        while (k > 0 && ph[k - 1] >= 0.5 * M * std::pow(r[k - 1], 2.0 * pr.kappa)) --k;
        out.R_bound = (k == r.size()) ? r.back() : r[k];
    }
    for (double t : t_ladder) {
        if (!(t > 0.0)) throw InvalidParameter("t must be positive");
        const double b = epsilon / std::sqrt(t);
        out.t.push_back(t);
        out.local_integrals.push_back(s.B() * std::pow(t, pr.kappa + 0.5 * pr.N) * area * local_integral(s, b, 1.0));
        if (less)
            out.local_p_integrals.push_back(std::pow(s.B(), out.p) * std::pow(t, pr.kappa * out.p + 0.5 * pr.N) * area *
                                            local_integral(s, b, out.p));
        if (boundary) {
            const double arg = epsilon / (out.R_bound * std::sqrt(t));
            out.log_lower_bound.push_back(arg > 1.0 ? s.B() * 0.5 * s.fit()->M_star * area * std::log(arg) : 0.0);
        }
    }
    out.trend = trend_of(out.t, out.local_integrals);
    if (less) out.p_trend = trend_of(out.t, out.local_p_integrals);
    return out;
}

ResidualReport pde_residual(const SelfSimilarSolution& s, double t, const std::vector<double>& xs, double h) {
    if (!(h > 0.0) || !(t - h > 0.0)) throw StencilOutOfDomain("time stencil leaves t > 0");
    const ModelParams& p = s.params();
    const int N = p.N;
    ResidualReport rep;
    auto guarded = [&](auto&& fn) {
        try {
            return fn();
        } catch (const OutOfDomain&) {
            throw StencilOutOfDomain("spatial stencil leaves the reconstructable region");
        }
    };
    for (double x0 : xs) {
        const double x = std::abs(x0);
        guarded([&] {
            const double u0 = s.u(x, t), up = s.u(x + h, t), um = s.u(x - h, t);
            const double v0 = s.v(x, t), vp = s.v(x + h, t), vm = s.v(x - h, t);
            if (!(v0 > 0.0 && vp > 0.0 && vm > 0.0)) throw DomainError("v must stay positive");
            const double ut = (s.u(x, t + h) - s.u(x, t - h)) / (2.0 * h);
            const double vt = (s.v(x, t + h) - s.v(x, t - h)) / (2.0 * h);
            const double u_r = (up - um) / (2.0 * h), u_rr = (up - 2.0 * u0 + um) / (h * h);
            const double v_r = (vp - vm) / (2.0 * h), v_rr = (vp - 2.0 * v0 + vm) / (h * h);
            const double lap_u = x > 0.0 ? u_rr + (N - 1) / x * u_r : N * u_rr;
            const double lap_v = x > 0.0 ? v_rr + (N - 1) / x * v_r : N * v_rr;
            const double w_r = (up / vp - um / vm) / (2.0 * h);
            const double chem = (u0 / v0) * lap_v + (x > 0.0 ? w_r * v_r : 0.0);

            const double tu[4] = {ut, -p.Du * lap_u, p.chi * (u0 / v0) * lap_v, p.chi * (x > 0.0 ? w_r * v_r : 0.0)};
            const double ru = ut - p.Du * lap_u + p.chi * chem;
            const double tv[3] = {vt, -p.Dv * lap_v, std::pow(v0, p.alpha) * u0};
            const double rv = vt - p.Dv * lap_v + tv[2];
            // Second differences lose eps |f| / h^2; terms below that are roundoff, not signal.
            const double eps = std::numeric_limits<double>::epsilon();
            double su = 64.0 * eps * std::abs(u0) * (p.Du / (h * h) + 1.0 / h);
            double sv = 64.0 * eps * std::abs(v0) * (p.Dv / (h * h) + 1.0 / h);
            for (double a : tu) su = std::max(su, std::abs(a));
            for (double a : tv) sv = std::max(sv, std::abs(a));
            const double eu = su > 0.0 ? std::abs(ru) / su : 0.0;
            const double ev = sv > 0.0 ? std::abs(rv) / sv : 0.0;
            rep.u_residual = std::max(rep.u_residual, eu);
            rep.v_residual = std::max(rep.v_residual, ev);
            if (std::max(eu, ev) > rep.max_residual) {
                rep.max_residual = std::max(eu, ev);
                rep.worst_x = x;
            }
            return 0;
        });
    }
    return rep;
}

MassReport mass_report(const SelfSimilarSolution& s, const std::vector<double>& ps, const std::vector<double>& times) {
    MassReport rep;
    rep.tail = s.tail().kind;
    rep.M = mass(s);
    rep.tail_fraction = tail_mass_fraction(s);
    for (double p : ps) rep.Mp[p] = lp_norm_constant(s, p);
    if (below_boundary(s.params()) && s.profile().outcome == Outcome::Global) rep.M1 = very_singular_moment(s);
    double defect = 0.0;
    for (double t : times) {
        if (rep.M > 0.0) defect = std::max(defect, std::abs(mass_direct(s, t) / rep.M - 1.0));
        for (const auto& [p, Mp] : rep.Mp)
            if (Mp > 0.0) defect = std::max(defect, std::abs(lp_norm_direct(s, t, p) / Mp - 1.0));
    }
    rep.t_invariance_defect = defect;
    return rep;
}

}  // namespace kschem
