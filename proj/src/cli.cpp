#include <cmath>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "pme/errors.hpp"
#include "pme/harness.hpp"

namespace pme {

namespace {

void print_summary(const VerificationReport& rep)
{
    std::printf("%-40s %-12s %14s %12s %12s %12s\n", "check", "status", "worst_slack", "r", "t", "tolerance");
    for (const CheckRecord& c : rep.checks) {
        std::printf("%-40s %-12s %14.6e %12.6g %12.6g %12.3e\n", c.id.c_str(), to_string(c.status),
                    c.worst_slack, c.r, c.t, c.tolerance);
    }
    if (rep.solver) {
        std::printf("solver: %ld steps, %ld Newton iterations (max %d per step), mass drift %.3e\n",
                    rep.solver->steps, rep.solver->newton_iterations, rep.solver->max_newton_iterations,
                    rep.solver->max_relative_mass_drift);
    }
}

int run_verify(const std::string& path, const std::string& report, const std::string& format)
{
    const Scenario s = load_scenario(path);
    const VerificationReport rep = run_scenario(s);
    print_summary(rep);
    if (!report.empty())
        emit_report(rep, format == "csv" ? ReportFormat::csv : ReportFormat::json, report);
    return rep.all_pass() ? 0 : 1;
}

std::vector<double> log_grid(double lo, double hi, int count)
{
    std::vector<double> t;
    for (int j = 0; j < count; ++j)
        t.push_back(count == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * j / (count - 1)));
    return t;
}

} // namespace

int cli_main(int argc, char** argv)
{
    CLI::App app{"Numerical verification of Li-Yau type gradient estimates and Harnack inequalities "
                 "for the porous medium equation"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string report_path;
    std::string format = "json";
    auto* verify = app.add_subcommand("verify", "Run every check of a scenario file");
    verify->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    verify->add_option("--report", report_path, "Write the report to this path");
    verify->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

    std::string kind;
    double m = 2.0;
    int n = 2;
    double M = 1.0;
    double K = 1.0;
    std::optional<double> alpha;
    double t_min = 0.1;
    double t_max = 10.0;
    int t_count = 11;
    auto* profiles = app.add_subcommand("profiles", "Tabulate alpha(t) and phi(t) of an estimate profile");
    profiles->add_option("--kind", kind, "Profile kind")->required();
    profiles->add_option("--m", m, "Porous medium exponent");
    profiles->add_option("--n", n, "Dimension");
    profiles->add_option("--M", M, "Supremum of the pressure");
    profiles->add_option("--K", K, "Ricci lower bound magnitude");
    profiles->add_option("--alpha", alpha, "Constant alpha (Davies and LNVV profiles)");
    profiles->add_option("--t-min", t_min, "First time");
    profiles->add_option("--t-max", t_max, "Last time");
    profiles->add_option("--t-count", t_count, "Number of log-spaced times");

    std::string limit_kind;
    int limit_n = 2;
    double limit_K = 1.0;
    double limit_t = 1.0;
    double limit_alpha = 2.0;
    int k_first = 2;
    int k_last = 20;
    auto* limits = app.add_subcommand("limits", "Compare a profile at m = 1 + eps with its heat-equation limit");
    limits->add_option("--kind", limit_kind, "Profile kind")->required();
    limits->add_option("--n", limit_n, "Dimension");
    limits->add_option("--K", limit_K, "Ricci lower bound magnitude");
    limits->add_option("--t", limit_t, "Time");
    limits->add_option("--alpha", limit_alpha, "Constant alpha (Davies and LNVV profiles)");
    limits->add_option("--k-first", k_first, "eps runs over 2^-k-first ...");
    limits->add_option("--k-last", k_last, "... down to 2^-k-last");

    double R = 1.0;
    std::string model_kind = "flat";
    int model_n = 2;
    double kappa = 1.0;
    int nodes = 4001;
    auto* calibrate = app.add_subcommand("calibrate-cutoff", "Measure the constants of the radial cutoff");
    calibrate->add_option("--R", R, "Cutoff radius");
    calibrate->add_option("--model", model_kind, "flat, hyperbolic or spherical");
    calibrate->add_option("--n", model_n, "Dimension");
    calibrate->add_option("--kappa", kappa, "Curvature scale of the model");
    calibrate->add_option("--nodes", nodes, "Grid nodes on [0, 2R]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*verify)
            return run_verify(scenario_path, report_path, format);

        if (*profiles) {
            const ProfileKind k = profile_kind_from_string(kind);
            const EstimateProfile p(k, PMEParameters(m, n), M, K, alpha);
            std::printf("# %s  a=%.10g  rate=(m-1)MK=%.10g\n", to_string(k), p.params().a(), p.rate());
            std::printf("%16s %20s %20s %20s %20s\n", "t", "alpha", "phi", "dalpha", "dphi");
            for (double t : log_grid(t_min, t_max, t_count))
                std::printf("%16.8g %20.12g %20.12g %20.12g %20.12g\n", t, p.alpha(t), p.phi(t), p.dalpha(t),
                            p.dphi(t));
            return 0;
        }

        if (*limits) {
            const ProfileKind k = profile_kind_from_string(limit_kind);
            const std::optional<double> a = uses_constant_alpha(k) ? std::optional<double>(limit_alpha) : std::nullopt;
            const HeatLimit lim = heat_equation_limit(k, limit_n, limit_K, limit_t, a);
            const auto pts = limit_convergence(k, limit_n, limit_K, limit_t, a, dyadic_eps(k_first, k_last));
            std::printf("# %s heat-equation limit: alpha=%.12g phi=%.12g\n", to_string(k), lim.alpha, lim.phi);
            std::printf("%14s %20s %20s %14s %14s %10s\n", "eps", "alpha", "phi*M", "alpha_error", "phi_error",
                        "ratio");
            for (std::size_t j = 0; j < pts.size(); ++j) {
                const LimitPoint& p = pts[j];
                const double ratio = j > 0 && pts[j - 1].phi_error > 0.0 ? p.phi_error / pts[j - 1].phi_error : NAN;
                std::printf("%14.6e %20.12g %20.12g %14.6e %14.6e %10.4f\n", p.eps, p.alpha, p.phi_times_M,
                            p.alpha_error, p.phi_error, ratio);
            }
            return 0;
        }

        if (*calibrate) {
            const ManifoldModel model = ManifoldModel::make(manifold_kind_from_string(model_kind), model_n,
                                                            model_kind == "flat" ? 0.0 : kappa);
            if (nodes < 33)
                throw ConfigError("--nodes must be >= 33");
            std::vector<double> grid(nodes);
            for (int i = 0; i < nodes; ++i)
                grid[i] = 2.0 * R * i / (nodes - 1);
            const CutoffFunction c = build_cutoff(model, R, grid);
            std::printf("model=%s n=%d kappa=%g K=%g R=%g\n", to_string(model.kind()), model.dimension(),
                        model.kappa(), model.ricci_bound(), R);
            std::printf("C_grad=%.10g\nC_lap=%.10g\ncurvature_factor=%.10g\n", c.c_grad, c.c_lap,
                        cutoff_curvature_factor(model.ricci_bound(), R));
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}

} // namespace pme
