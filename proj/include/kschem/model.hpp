#pragma once

#include <optional>
#include <string>
#include <variant>

namespace kschem {

struct ModelParams {
    int N = 1;
    double Du = 1.0;
    double Dv = 1.0;
    double chi = 1.0;
    double alpha = 0.0;
    double kappa = 0.0;
    double q = 1.0;
    std::optional<double> sigma;

    // Derives kappa (or takes the supplied one when alpha == 1), q and sigma, then validates.
    static ModelParams make(int N, double Du, double Dv, double chi, double alpha,
                            std::optional<double> kappa = std::nullopt);
};

struct AnyKappa {};
using KappaValue = std::variant<double, AnyKappa>;

KappaValue derive_kappa(int N, double alpha);

enum class VClass { Regular, LessSingular, VerySingular, AnyDependsOnKappa };

struct KappaBand {
    double lo;
    double hi;
    bool lo_closed;
    bool hi_closed;
};

struct SingularityClass {
    VClass tag;
    KappaBand kappa_band;
};

SingularityClass classify_v(int N, double alpha, double kappa);

// Row lookup by (N, alpha) alone; (N=2, alpha=1) gives AnyDependsOnKappa.
VClass table_entry(int N, double alpha);

// Text as printed in the classification table, e.g. "very singular".
std::string describe(VClass c);
// CLI token, e.g. "very_singular".
std::string token(VClass c);

ModelParams validate(const ModelParams& p);

// Surface measure of the unit sphere in R^N.
double sphere_area(int N);

// True when kappa < -N/2 (strictly, outside the band tolerance).
bool below_boundary(const ModelParams& p);

}  // namespace kschem
