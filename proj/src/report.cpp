#include "kschem/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <initializer_list>
#include <utility>

#include "kschem/errors.hpp"

namespace kschem {

namespace {

json num(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

json pair_json(std::pair<double, double> p) { return json::array({num(p.first), num(p.second)}); }

std::string p_key(double p) { return std::isinf(p) ? "inf" : format_number(p); }

enum class T { Number, NumberOrNull, Integer, Bool, String, Pair, Object };

bool has_type(const json& v, T t) {
    switch (t) {
        case T::Number: return v.is_number();
        case T::NumberOrNull: return v.is_number() || v.is_null();
        case T::Integer: return v.is_number_integer() || v.is_number_unsigned();
        case T::Bool: return v.is_boolean();
        case T::String: return v.is_string();
        case T::Pair: return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number();
        case T::Object: return v.is_object();
    }
    return false;
}

void require(const json& j, std::initializer_list<std::pair<const char*, T>> fields, const char* what) {
    if (!j.is_object()) throw InvalidParameter(std::string(what) + " report must be a JSON object");
    for (const auto& [name, t] : fields) {
        if (!j.contains(name)) throw InvalidParameter(std::string(what) + " report lacks field '" + name + "'");
        if (!has_type(j.at(name), t))
            throw InvalidParameter(std::string(what) + " report field '" + name + "' has the wrong type");
    }
}

bool is_outcome(const json& v) {
    return v.is_string() && (v == "Global" || v == "BlowUp" || v == "TouchZero");
}

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

json to_json(const CriticalResult& r) {
    json j;
    j["lambda_star"] = r.lambda_star;
    j["bracket"] = pair_json(r.bracket);
    j["iterations"] = r.iterations;
    j["endpoint_outcomes"] = {{"lo", to_string(r.outcome_lo)}, {"hi", to_string(r.outcome_hi)}};
    const auto& c = r.controls;
    j["controls"] = {{"tol_rel", c.tol_rel},
                     {"max_iter", c.max_iter},
                     {"r_max", c.profile.r_max},
                     {"rel_tol", c.profile.rel_tol},
                     {"abs_tol", c.profile.abs_tol},
                     {"phi_ceiling", c.profile.phi_ceiling},
                     {"phi_floor", c.profile.phi_floor}};
    return j;
}

json to_json(const AsymptoticFit& f) {
    json j;
    j["M_star"] = num(f.M_star);
    j["window"] = pair_json(f.window);
    j["plateau_defect"] = num(f.plateau_defect);
    j["converged"] = f.converged;
    return j;
}

json to_json(const VariationalState& s) {
    json j;
    j["J"] = s.J_val;
    j["H"] = s.H_val;
    j["M_star"] = s.M_star;
    j["el_residual"] = s.el_residual;
    j["R_cut"] = s.R_cut;
    j["nodes"] = s.nodes;
    j["M_descent"] = s.M_descent;
    j["phi_star_0"] = s.phi_star.empty() ? json(nullptr) : json(s.phi_star.front());
    j["iterations"] = s.iterations;
    j["gradient_norm"] = num(s.gradient_norm);
    return j;
}

json to_json(const MassReport& m) {
    json j;
    j["M"] = m.M;
    json mp = json::object();
    for (const auto& [p, v] : m.Mp) mp[p_key(p)] = num(v);
    j["Mp"] = mp;
    j["M1"] = m.M1 ? json(*m.M1) : json(nullptr);
    j["t_invariance_defect"] = m.t_invariance_defect;
    j["tail"] = to_string(m.tail);
    j["tail_fraction"] = m.tail_fraction;
    return j;
}

json to_json(const ResidualReport& r, double t, double h) {
    json j;
    j["t"] = t;
    j["h"] = h;
    j["max_residual"] = r.max_residual;
    j["u_residual"] = r.u_residual;
    j["v_residual"] = r.v_residual;
    j["worst_x"] = r.worst_x;
    return j;
}

json to_json(const ProfileSolution& s) {
    json j;
    j["lambda"] = s.lambda;
    j["outcome"] = to_string(s.outcome);
    j["radius"] = num(s.radius);
    j["nodes"] = s.r.size();
    j["r_end"] = s.r.empty() ? json(nullptr) : json(s.r_end());
    return j;
}

void validate_report(const json& j, ReportKind kind) {
    switch (kind) {
        case ReportKind::Critical: {
            require(j,
                    {{"lambda_star", T::Number},
                     {"bracket", T::Pair},
                     {"iterations", T::Integer},
                     {"endpoint_outcomes", T::Object},
                     {"controls", T::Object}},
                    "critical");
            const json& e = j["endpoint_outcomes"];
            if (!e.contains("lo") || !e.contains("hi") || !is_outcome(e["lo"]) || !is_outcome(e["hi"]))
                throw InvalidParameter("critical report endpoint_outcomes must hold lo/hi outcomes");
            if (e["lo"] == e["hi"]) throw InvalidParameter("critical report endpoint outcomes must differ");
            require(j["controls"], {{"tol_rel", T::Number}, {"max_iter", T::Integer}, {"r_max", T::Number}},
                    "critical controls");
            const double lo = j["bracket"][0], hi = j["bracket"][1], ls = j["lambda_star"];
            if (!(lo < hi && lo <= ls && ls <= hi)) throw InvalidParameter("critical report bracket inconsistent");
            break;
        }
        case ReportKind::Fit:
            require(j,
                    {{"M_star", T::NumberOrNull},
                     {"window", T::Pair},
                     {"plateau_defect", T::NumberOrNull},
                     {"converged", T::Bool}},
                    "fit");
            break;
        case ReportKind::Variational:
            require(j,
                    {{"J", T::Number},
                     {"H", T::Number},
                     {"M_star", T::Number},
                     {"el_residual", T::Number},
                     {"R_cut", T::Number},
                     {"nodes", T::Integer}},
                    "variational");
            break;
        case ReportKind::Mass: {
            require(j,
                    {{"M", T::Number}, {"Mp", T::Object}, {"M1", T::NumberOrNull}, {"t_invariance_defect", T::Number}},
                    "mass");
            for (const auto& [k, v] : j["Mp"].items())
                if (!v.is_number()) throw InvalidParameter("mass report Mp['" + k + "'] must be a number");
            break;
        }
        case ReportKind::Residual:
            require(j,
                    {{"t", T::Number},
                     {"h", T::Number},
                     {"max_residual", T::Number},
                     {"u_residual", T::Number},
                     {"v_residual", T::Number}},
                    "residual");
            break;
        case ReportKind::Eigen: {
            require(j, {{"N", T::Integer}, {"delta", T::Number}}, "eigen");
            if (!j.contains("rows") || !j["rows"].is_array()) throw InvalidParameter("eigen report lacks 'rows'");
            for (const auto& row : j["rows"])
                require(row, {{"R", T::Number}, {"lambda", T::Number}, {"shift", T::Number}}, "eigen row");
            break;
        }
        case ReportKind::Solve:
            require(j,
                    {{"lambda", T::Number},
                     {"outcome", T::String},
                     {"radius", T::NumberOrNull},
                     {"nodes", T::Integer}},
                    "solve");
            if (!is_outcome(j["outcome"])) throw InvalidParameter("solve report outcome is not a known outcome");
            break;
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace kschem
