#include "kschem/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kschem/errors.hpp"

namespace kschem {

namespace {

double band_tol(int N) {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, 0.5 * N);
}

void check_dimension_alpha(int N, double alpha) {
    if (N < 1) throw InvalidParameter("N must be >= 1, got " + std::to_string(N));
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw InvalidParameter("alpha must be finite and >= 0");
}

}  // namespace

KappaValue derive_kappa(int N, double alpha) {
    check_dimension_alpha(N, alpha);
    if (alpha == 1.0) {
        if (N == 2) return AnyKappa{};
        throw InvalidScaling("alpha = 1 requires N = 2 (kappa*(1-alpha) = 1-N/2 has no solution)");
    }
    return (1.0 - 0.5 * N) / (1.0 - alpha);
}

SingularityClass classify_v(int N, double alpha, double kappa) {
    derive_kappa(N, alpha);
    if (!std::isfinite(kappa)) throw InvalidParameter("kappa must be finite");
    const double inf = std::numeric_limits<double>::infinity();
    const double edge = -0.5 * N;
    const double tol = band_tol(N);
    if (kappa >= -tol) return {VClass::Regular, {0.0, inf, true, false}};
    if (kappa <= edge + tol * std::abs(edge)) return {VClass::VerySingular, {-inf, edge, false, true}};
    return {VClass::LessSingular, {edge, 0.0, false, false}};
}

VClass table_entry(int N, double alpha) {
    KappaValue k = derive_kappa(N, alpha);
    if (std::holds_alternative<AnyKappa>(k)) return VClass::AnyDependsOnKappa;
    return classify_v(N, alpha, std::get<double>(k)).tag;
}

std::string describe(VClass c) {
    switch (c) {
        case VClass::Regular: return "regular";
        case VClass::LessSingular: return "less singular";
        case VClass::VerySingular: return "very singular";
        case VClass::AnyDependsOnKappa: return "any (regular, less singular, very singular)";
    }
    return "";
}

std::string token(VClass c) {
    switch (c) {
        case VClass::Regular: return "regular";
        case VClass::LessSingular: return "less_singular";
        case VClass::VerySingular: return "very_singular";
        case VClass::AnyDependsOnKappa: return "any";
    }
    return "";
}

ModelParams validate(const ModelParams& p) {
    check_dimension_alpha(p.N, p.alpha);
    for (auto [name, val] : {std::pair{"Du", p.Du}, std::pair{"Dv", p.Dv}, std::pair{"chi", p.chi}}) {
        if (!std::isfinite(val) || !(val > 0.0))
            throw NonPositiveDiffusivity(std::string(name) + " must be positive and finite");
    }
    ModelParams out = p;
    KappaValue k = derive_kappa(p.N, p.alpha);
    if (std::holds_alternative<double>(k)) {
        const double kd = std::get<double>(k);
        if (std::abs(p.kappa - kd) > 1e-12 * std::max(1.0, std::abs(kd)))
            throw InvalidScaling("kappa does not satisfy kappa*(1-alpha) = 1-N/2");
        out.kappa = kd;
    } else if (!std::isfinite(p.kappa)) {
        throw InvalidParameter("kappa must be finite");
    }
    out.q = p.alpha + p.chi / p.Du;
    if (out.q < 1.0)
        throw ExponentBelowOne("q = alpha + chi/Du = " + std::to_string(out.q) + " < 1");
    const double den = 4.0 * p.Du * (p.alpha - 1.0) + 4.0 * p.chi;
    if (out.q > 1.0 && den > 0.0)
        out.sigma = 1.0 / den;
    else
        out.sigma.reset();
    return out;
}

ModelParams ModelParams::make(int N, double Du, double Dv, double chi, double alpha,
                              std::optional<double> kappa) {
    ModelParams p;
    p.N = N;
    p.Du = Du;
    p.Dv = Dv;
    p.chi = chi;
    p.alpha = alpha;
    KappaValue k = derive_kappa(N, alpha);
    if (std::holds_alternative<AnyKappa>(k)) {
        if (!kappa) throw InvalidParameter("N = 2, alpha = 1 leaves kappa free; it must be supplied");
        p.kappa = *kappa;
    } else {
        p.kappa = kappa ? *kappa : std::get<double>(k);
    }
    return validate(p);
}

double sphere_area(int N) {
    constexpr double pi = std::numbers::pi;
    switch (N) {
        case 1: return 2.0;
        case 2: return 2.0 * pi;
        case 3: return 4.0 * pi;
        case 4: return 2.0 * pi * pi;
        default: return 2.0 * std::pow(pi, 0.5 * N) / std::tgamma(0.5 * N);
    }
}

bool below_boundary(const ModelParams& p) {
    return classify_v(p.N, p.alpha, p.kappa).tag == VClass::VerySingular &&
           p.kappa < -0.5 * p.N * (1.0 + band_tol(p.N));
}

}  // namespace kschem
