#pragma once

#include <json.hpp>
#include <string>

#include "kschem/asymptotics.hpp"
#include "kschem/selfsim.hpp"
#include "kschem/shooting.hpp"
#include "kschem/spectral.hpp"
#include "kschem/variational.hpp"

namespace kschem {

using json = nlohmann::ordered_json;

enum class ReportKind { Critical, Fit, Variational, Mass, Residual, Eigen, Solve };

json to_json(const CriticalResult& r);
json to_json(const AsymptoticFit& f);
json to_json(const VariationalState& s);
json to_json(const MassReport& m);
json to_json(const ResidualReport& r, double t, double h);
json to_json(const ProfileSolution& s);

// Throws InvalidParameter naming the first missing or mistyped field.
void validate_report(const json& j, ReportKind kind);

// Serialization used for every report written by the CLI.
std::string dump(const json& j);

// Shortest decimal that round-trips.
std::string format_number(double x);

}  // namespace kschem
