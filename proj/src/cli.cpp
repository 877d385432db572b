#include "kschem/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "kschem/errors.hpp"
#include "kschem/report.hpp"

namespace kschem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ParamFlags {
    int N = 1;
    double alpha = 0.0;
    double Du = 1.0;
    double Dv = 1.0;
    double chi = 1.0;
    std::optional<double> kappa;

    ModelParams build() const { return ModelParams::make(N, Du, Dv, chi, alpha, kappa); }
};

struct Tolerances {
    double rel_tol = ProfileControls{}.rel_tol;
    double abs_tol = ProfileControls{}.abs_tol;
    double r_max = ProfileControls{}.r_max;
    double bisect_tol = CriticalControls{}.tol_rel;

    ProfileControls profile() const {
        ProfileControls c;
        c.rel_tol = rel_tol;
        c.abs_tol = abs_tol;
        c.r_max = r_max;
        return c;
    }
};

void add_params(CLI::App* app, ParamFlags& f, bool need_alpha = true) {
    app->add_option("--N", f.N, "spatial dimension")->check(CLI::PositiveNumber);
    auto* a = app->add_option("--alpha", f.alpha, "consumption exponent");
    if (need_alpha) a->required();
    app->add_option("--Du", f.Du, "cell diffusivity");
    app->add_option("--Dv", f.Dv, "signal diffusivity");
    app->add_option("--chi", f.chi, "chemotactic sensitivity");
    app->add_option("--kappa", f.kappa, "scaling exponent (only for N=2, alpha=1)");
}

void add_tolerances(CLI::App* app, Tolerances& t) {
    app->add_option("--rel-tol", t.rel_tol, "integrator relative tolerance")->envname("KSCHEM_REL_TOL");
    app->add_option("--abs-tol", t.abs_tol, "integrator absolute tolerance")->envname("KSCHEM_ABS_TOL");
    app->add_option("--r-max", t.r_max, "integration end radius")->envname("KSCHEM_R_MAX");
}

struct Output {
    std::string path;
    std::string format;
};

void add_output(CLI::App* app, Output& o, const std::string& default_format) {
    o.format = default_format;
    app->add_option("--out", o.path, "output file (default: stdout)");
    app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Output& o, const std::string& text, std::ostream& out) {
    if (o.path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.path, std::ios::binary);
    if (!f) throw InvalidParameter("cannot open output file " + o.path);
    f << text;
}

std::string csv_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

SelfSimilarSolution build_selfsim(const ModelParams& p, double A, double B, const std::optional<double>& lambda,
                                  const ProfileControls& pc) {
    const double lam = A * std::pow(B, p.alpha - 1.0);
    if (lambda && std::abs(*lambda - lam) > 1e-12 * std::max(std::abs(lam), 1e-300))
        throw InconsistentAmplitudes("--lambda disagrees with A B^{alpha-1}");
    ProfileSolution prof = integrate_profile(p, lam, pc);
    if (prof.outcome != Outcome::Global)
        throw NotGlobal("profile at lambda = " + format_number(lam) + " is " + to_string(prof.outcome));
    if (!below_boundary(p) && !fit_rate(prof).converged && pc.r_max < 80.0) {
        ProfileControls c2 = pc;
        c2.r_max = 80.0;
        prof = integrate_profile(p, lam, c2);
    }
    return SelfSimilarSolution::make(std::move(prof), A, B);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> x;
    if (n == 1) return {a};
    for (std::size_t i = 0; i < n; ++i) x.push_back(a + (b - a) * i / (n - 1));
    return x;
}

struct SweepRow {
    double alpha = 0.0;
    double kappa = kNaN;
    std::string cls = "invalid";
    double lambda_star = kNaN;
    double M_star = kNaN;
};

SweepRow sweep_point(const ParamFlags& base, double alpha, double chi, const Tolerances& tol) {
    SweepRow row;
    row.alpha = alpha;
    ParamFlags f = base;
    f.alpha = alpha;
    f.chi = chi;
    ModelParams p;
    try {
        p = f.build();
    } catch (const InputError&) {
        return row;
    }
    row.kappa = p.kappa;
    row.cls = token(classify_v(p.N, p.alpha, p.kappa).tag);
    if (!(p.q > 1.0)) return row;
    try {
        CriticalControls cc;
        cc.tol_rel = tol.bisect_tol;
        cc.profile = tol.profile();
        const auto br = expand_bracket(p, {0.01, 1.0}, cc.profile);
        const CriticalResult cr = find_critical_lambda(p, br, cc);
        row.lambda_star = cr.lambda_star;
        if (below_boundary(p)) {
            VariationalControls vc;
            vc.nodes = 2000;
            row.M_star = minimize_constrained(p, vc).M_star;
        } else {
            auto [s, fit] = solve_with_rate(p, 0.5 * cr.lambda_star, cc.profile);
            if (fit.converged) row.M_star = fit.M_star;
        }
    } catch (const Error&) {
    }
    return row;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-similar profiles of a singular chemotaxis model with consumption"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all");

    ParamFlags pf;
    Tolerances tol;
    std::optional<double> lambda;
    double eta = kNaN;
    double A = 1.0, B = 1.0;

    Output o_solve, o_crit, o_eigen, o_var, o_rec, o_mass, o_sweep, o_res;
    auto* solve = app.add_subcommand("solve", "integrate one profile");
    add_params(solve, pf);
    add_tolerances(solve, tol);
    add_output(solve, o_solve, "csv");
    solve->add_option("--lambda", lambda, "shooting parameter A B^{alpha-1}");
    solve->add_option("--eta", eta, "exponent of the g_eta column (default 2 kappa)");

    double lo = 0.01, hi = 100.0;
    bool expand = false;
    std::size_t max_iter = CriticalControls{}.max_iter;
    auto* critical = app.add_subcommand("critical", "bisect for the critical lambda");
    add_params(critical, pf);
    add_tolerances(critical, tol);
    add_output(critical, o_crit, "json");
    critical->add_option("--lo", lo, "lower bracket end");
    critical->add_option("--hi", hi, "upper bracket end");
    critical->add_flag("--expand", expand, "expand the bracket until it straddles the threshold");
    critical->add_option("--tol-rel", tol.bisect_tol, "relative bracket width")->envname("KSCHEM_BISECT_TOL");
    critical->add_option("--max-iter", max_iter, "bisection iteration cap");

    auto* classify = app.add_subcommand("classify", "singularity class of v at t = 0");
    add_params(classify, pf);

    double delta = 0.25;
    std::vector<double> Rs{2, 5, 10, 30};
    int eigN = 1;
    auto* eigen = app.add_subcommand("eigen", "principal eigenvalue ladder");
    eigen->add_option("--N", eigN, "dimension")->check(CLI::PositiveNumber);
    eigen->add_option("--delta", delta, "weight exponent");
    eigen->add_option("--R", Rs, "right endpoints")->delimiter(',');
    add_output(eigen, o_eigen, "csv");

    double R_cut = VariationalControls{}.R_cut;
    std::size_t nodes = VariationalControls{}.nodes;
    bool rcut_check = false;
    auto* variational = app.add_subcommand("variational", "constrained minimizer for kappa < -N/2");
    add_params(variational, pf);
    add_output(variational, o_var, "json");
    variational->add_option("--R-cut", R_cut, "truncation radius");
    variational->add_option("--nodes", nodes, "grid nodes");
    variational->add_flag("--rcut-check", rcut_check, "also report the change when R_cut moves to 35");

    std::vector<double> times{1.0};
    double x_max = 10.0;
    std::size_t points = 201;
    auto* reconstruct_cmd = app.add_subcommand("reconstruct", "space-time solution (u, v)");
    add_params(reconstruct_cmd, pf);
    add_tolerances(reconstruct_cmd, tol);
    add_output(reconstruct_cmd, o_rec, "csv");
    reconstruct_cmd->add_option("--A", A, "amplitude of u")->required();
    reconstruct_cmd->add_option("--B", B, "amplitude of v")->required();
    reconstruct_cmd->add_option("--lambda", lambda, "optional consistency check of A B^{alpha-1}");
    reconstruct_cmd->add_option("--t", times, "times")->delimiter(',');
    reconstruct_cmd->add_option("--x-max", x_max, "largest |x|");
    reconstruct_cmd->add_option("--points", points, "samples in [0, x-max]");

    std::vector<std::string> ps{"2", "inf"};
    std::vector<double> probe_times{0.25, 1.0, 4.0};
    auto* mass_cmd = app.add_subcommand("mass", "mass and L^p invariants");
    add_params(mass_cmd, pf);
    add_tolerances(mass_cmd, tol);
    add_output(mass_cmd, o_mass, "json");
    mass_cmd->add_option("--A", A, "amplitude of u")->required();
    mass_cmd->add_option("--B", B, "amplitude of v")->required();
    mass_cmd->add_option("--lambda", lambda, "optional consistency check of A B^{alpha-1}");
    mass_cmd->add_option("--p", ps, "exponents in (1, inf]")->delimiter(',');
    mass_cmd->add_option("--times", probe_times, "probe times")->delimiter(',');

    double a_min = 0.0, a_max = 3.0;
    std::size_t a_steps = 7;
    std::vector<double> chis;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep = app.add_subcommand("sweep", "critical lambda and rate constant over an alpha grid");
    add_params(sweep, pf, false);
    add_tolerances(sweep, tol);
    sweep->add_option("--out", o_sweep.path, "output file (default: stdout)");
    sweep->add_option("--alpha-min", a_min, "first alpha");
    sweep->add_option("--alpha-max", a_max, "last alpha");
    sweep->add_option("--alpha-steps", a_steps, "number of alpha values")->check(CLI::PositiveNumber);
    sweep->add_option("--chis", chis, "optional chi values")->delimiter(',');
    sweep->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--tol-rel", tol.bisect_tol, "relative bracket width")->envname("KSCHEM_BISECT_TOL");

    double t_res = 1.0, h_res = 1e-3;
    std::optional<double> time_exponent;
    auto* residual = app.add_subcommand("residual", "finite-difference residual of the PDE system");
    add_params(residual, pf);
    add_tolerances(residual, tol);
    add_output(residual, o_res, "json");
    residual->add_option("--A", A, "amplitude of u")->required();
    residual->add_option("--B", B, "amplitude of v")->required();
    residual->add_option("--lambda", lambda, "optional consistency check of A B^{alpha-1}");
    residual->add_option("--t", t_res, "sample time");
    residual->add_option("--stencil", h_res, "finite-difference spacing in x and t");
    residual->add_option("--x-max", x_max, "largest |x|");
    residual->add_option("--points", points, "samples in [0, x-max]");
    residual->add_option("--time-exponent", time_exponent, "override the time exponent of v");

    std::string check_kind, check_in;
    auto* check = app.add_subcommand("check", "re-validate a JSON report");
    check->add_option("--kind", check_kind, "report kind")
        ->required()
        ->check(CLI::IsMember({"critical", "fit", "variational", "mass", "residual", "eigen", "solve"}));
    check->add_option("--in", check_in, "report file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*classify) {
            const KappaValue kv = derive_kappa(pf.N, pf.alpha);
            double k;
            if (std::holds_alternative<AnyKappa>(kv)) {
                if (!pf.kappa) throw InvalidParameter("--kappa is required for N = 2, alpha = 1");
                k = *pf.kappa;
            } else {
                k = std::get<double>(kv);
            }
            out << "kappa=" << format_number(k) << " " << token(classify_v(pf.N, pf.alpha, k).tag) << "\n";
            return 0;
        }
        if (*check) {
            std::ifstream f(check_in);
            if (!f) throw InvalidParameter("cannot read " + check_in);
            json j;
            try {
                j = json::parse(f);
            } catch (const json::exception& e) {
                throw InvalidParameter(std::string("not valid JSON: ") + e.what());
            }
            const std::map<std::string, ReportKind> kinds{{"critical", ReportKind::Critical},
                                                          {"fit", ReportKind::Fit},
                                                          {"variational", ReportKind::Variational},
                                                          {"mass", ReportKind::Mass},
                                                          {"residual", ReportKind::Residual},
                                                          {"eigen", ReportKind::Eigen},
                                                          {"solve", ReportKind::Solve}};
            validate_report(j, kinds.at(check_kind));
            out << "ok\n";
            return 0;
        }
        if (*eigen) {
            std::ostringstream s;
            json j{{"N", eigN}, {"delta", delta}, {"rows", json::array()}};
            if (o_eigen.format == "csv") s << "R,lambda\n";
            for (double R : Rs) {
                const EigenResult e = principal_eigenvalue({eigN, delta, R});
                if (o_eigen.format == "csv")
                    s << csv_num(R) << "," << csv_num(e.lambda) << "\n";
                else
                    j["rows"].push_back({{"R", R}, {"lambda", e.lambda}, {"shift", e.shift}});
            }
            emit(o_eigen, o_eigen.format == "csv" ? s.str() : dump(j), out);
            return 0;
        }
        if (*sweep) {
            if (chis.empty()) chis.push_back(pf.chi);
            std::vector<std::pair<double, double>> grid;
            for (double c : chis)
                for (double a : linspace(a_min, a_max, a_steps)) grid.emplace_back(a, c);
            std::vector<SweepRow> rows(grid.size());
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i; (i = next.fetch_add(1)) < grid.size();)
                    rows[i] = sweep_point(pf, grid[i].first, grid[i].second, tol);
            };
            std::vector<std::thread> pool;
            for (unsigned i = 0; i < std::min<std::size_t>(threads, grid.size()); ++i) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
            std::ostringstream s;
            s << (chis.size() > 1 ? "chi,alpha,kappa,class,lambda_star,M_star\n" : "alpha,kappa,class,lambda_star,M_star\n");
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const SweepRow& r = rows[i];
                if (chis.size() > 1) s << csv_num(grid[i].second) << ",";
                s << csv_num(r.alpha) << "," << csv_num(r.kappa) << "," << r.cls << "," << csv_num(r.lambda_star) << ","
                  << csv_num(r.M_star) << "\n";
            }
            emit(o_sweep, s.str(), out);
            return 0;
        }

        const ModelParams p = pf.build();
        const ProfileControls pc = tol.profile();

        if (*solve) {
            if (!lambda) throw InvalidParameter("--lambda is required for solve");
            ProfileSolution sol = integrate_profile(p, *lambda, pc);
            if (o_solve.format == "csv") {
                std::ostringstream s;
                write_profile_csv(s, sol, std::isnan(eta) ? 2.0 * p.kappa : eta);
                emit(o_solve, s.str(), out);
            } else {
                json j = to_json(sol);
                if (sol.outcome == Outcome::Global && !below_boundary(p)) j["fit"] = to_json(fit_rate(sol));
                emit(o_solve, dump(j), out);
            }
            return 0;
        }
        if (*critical) {
            CriticalControls cc;
            cc.tol_rel = tol.bisect_tol;
            cc.max_iter = max_iter;
            cc.profile = pc;
            std::pair<double, double> br{lo, hi};
            if (expand) br = expand_bracket(p, br, pc);
            emit(o_crit, dump(to_json(find_critical_lambda(p, br, cc))), out);
            return 0;
        }
        if (*variational) {
            VariationalControls vc;
            vc.R_cut = R_cut;
            vc.nodes = nodes;
            const VariationalState st = minimize_constrained(p, vc);
            if (o_var.format == "csv") {
                std::ostringstream s;
                s << "r,phi\n";
                for (std::size_t i = 0; i < st.r.size(); ++i) s << csv_num(st.r[i]) << "," << csv_num(st.phi_star[i]) << "\n";
                emit(o_var, s.str(), out);
            } else {
                json j = to_json(st);
                j["lambda_equiv"] = st.M_star * std::pow(st.phi_star.front(), p.q - 1.0);
                if (rcut_check) j["rcut_sensitivity"] = r_cut_sensitivity(p, vc);
                emit(o_var, dump(j), out);
            }
            return 0;
        }
        if (*reconstruct_cmd) {
            const SelfSimilarSolution s = build_selfsim(p, A, B, lambda, pc);
            const std::vector<double> xs = linspace(0.0, x_max, points);
            std::ostringstream os;
            os << "t,x,u,v\n";
            for (double t : times) {
                auto [u, v] = reconstruct(s, t, xs);
                for (std::size_t i = 0; i < xs.size(); ++i)
                    os << csv_num(t) << "," << csv_num(xs[i]) << "," << csv_num(u[i]) << "," << csv_num(v[i]) << "\n";
            }
            emit(o_rec, os.str(), out);
            return 0;
        }
        if (*mass_cmd) {
            const SelfSimilarSolution s = build_selfsim(p, A, B, lambda, pc);
            std::vector<double> pv;
            for (const auto& t : ps) {
                if (t == "inf")
                    pv.push_back(INFINITY);
                else
                    try {
                        pv.push_back(std::stod(t));
                    } catch (const std::exception&) {
                        throw InvalidParameter("--p: cannot parse '" + t + "'");
                    }
            }
            emit(o_mass, dump(to_json(mass_report(s, pv, probe_times))), out);
            return 0;
        }
        if (*residual) {
            SelfSimilarSolution s = build_selfsim(p, A, B, lambda, pc);
            if (time_exponent) s = s.with_time_exponent(*time_exponent);
            const ResidualReport r = pde_residual(s, t_res, linspace(0.0, x_max, points), h_res);
            emit(o_res, dump(to_json(r, t_res, h_res)), out);
            return 0;
        }
    } catch (const InputError& e) {
        err << "error: " << e.name() << ": " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.name() << ": " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace kschem
