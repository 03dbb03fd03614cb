// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pme/errors.hpp"
#include "pme/estimates.hpp"
#include "pme/harness.hpp"
#include "pme/harnack.hpp"
#include "pme/lemma.hpp"
#include "pme/pressure.hpp"

using namespace pme;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i)
        x[i] = a + (b - a) * i / (n - 1);
    return x;
}

std::vector<double> log_grid(double lo, double hi, int count)
{
    std::vector<double> t(count);
    for (int j = 0; j < count; ++j)
        t[j] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * j / (count - 1));
    return t;
}

// 1. Aronson-Benilan sharpness on Barenblatt-interior pressure
Outcome sharpness(double& worst_runtime)
{
    bool ok = true;
    std::string detail;
    worst_runtime = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const auto start = std::chrono::steady_clock::now();
        const double m = 2.0;
        const PMEParameters params(m, n);
        const double r_max = 0.8 * barenblatt_front(n, m, 1.0, 1.0);
        const SolutionField sol = sample_field(ManifoldModel::flat(n), params, linspace(0, r_max, 512), linspace(1, 2, 256),
                                               [&](double r, double t) { return barenblatt(n, m, t, r, 1.0); });
        const PressureField pf = pressure_field(sol);
        double rel = 0.0;
        for (std::size_t k = 0; k < pf.nt(); ++k) {
            const double target = params.a() / pf.t[k];
            for (std::size_t i = 0; i < pf.nr(); ++i)
                rel = std::max(rel, std::abs(-(m - 1) * pf.lap[pf.index(k, i)] - target) / target);
        }
        const EstimateProfile prof(ProfileKind::constant_alpha_davies, params, pf.sup, 0.0, 1.0 + 1e-6);
        NodeSelection sel;
        sel.time_origin = 0.0; // the Barenblatt solution starts at t = 0
        const DeficitField d = li_yau_deficit(pf, prof, sel);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        worst_runtime = std::max(worst_runtime, secs);
        const bool pass = rel < 1e-3 && std::abs(d.min_slack) < 1e-3 && secs < 10.0;
        ok = ok && pass;
        detail += "n=" + std::to_string(n) + ": rel " + fmt("%.2e", rel) + ", |min slack| " +
                  fmt("%.2e", std::abs(d.min_slack)) + ", " + fmt("%.2fs", secs) + "; ";
    }
    return {ok, detail};
}

// 2. Noncompact bounds on solved hyperbolic fields
Outcome noncompact_suite()
{
    bool ok = true;
    std::string detail;
    for (double m : {1.5, 2.0, 3.0}) {
        json doc = {{"manifold", {{"kind", "hyperbolic"}, {"n", 2}, {"kappa", 1.0}}},
                    {"pme", {{"m", m}}},
                    {"grid", {{"r_max", 6.0}, {"nr", 121}, {"t0", 1.0}, {"T", 3.0}, {"nt", 81}, {"substeps", 2}}},
                    {"initial_data", {{"type", "gaussian_bump"}, {"base", 1.0}, {"amplitude", 1.0}, {"width", 1.0}}},
                    {"checks", json::array({
                                   {{"type", "noncompact_bound"}, {"profile", "constant_alpha_davies"},
                                    {"alpha", {1.1, 1.5, 2.0, 4.0}}},
                                   {{"type", "noncompact_bound"}, {"profile", "hamilton"}},
                                   {{"type", "noncompact_bound"}, {"profile", "lixu_hyperbolic"}},
                                   {{"type", "noncompact_bound"}, {"profile", "lixu_linear"}},
                               })}};
        const VerificationReport rep = run_scenario(parse_scenario(doc));
        double worst_ratio = std::numeric_limits<double>::infinity();
        for (const CheckRecord& c : rep.checks) {
            ok = ok && c.status == CheckStatus::pass;
            worst_ratio = std::min(worst_ratio, c.worst_slack / std::max(c.tolerance, 1e-300));
        }
        detail += "m=" + fmt("%g", m) + ": " + std::to_string(rep.checks.size()) + " deficits, min slack/tol " +
                  fmt("%.3g", worst_ratio) + "; ";
    }
    return {ok, detail};
}

// 3. ODE systems of the Li-Xu profiles
Outcome ode_systems()
{
    const PMEParameters params(2.0, 2);
    double worst_rel = 0.0;
    double worst_abs = 0.0;
    for (double rate : {1e-3, 1.0, 1e3}) {
        for (auto kind : {ProfileKind::lixu_hyperbolic, ProfileKind::lixu_linear}) {
            const EstimateProfile prof(kind, params, rate, 1.0);
            for (double t : log_grid(1e-4, 1e4, 100)) {
                const OdeResidual r = ode_residual(prof, t);
                worst_rel = std::max({worst_rel, std::abs(r.relative1()), std::abs(r.relative2())});
                worst_abs = std::max({worst_abs, std::abs(r.r1), std::abs(r.r2)});
            }
        }
    }
    return {worst_rel < 1e-10,
            "max relative residual " + fmt("%.2e", worst_rel) + " (max absolute " + fmt("%.2e", worst_abs) + ")"};
}

// 4. Harnack closed forms against quadrature
Outcome harnack_cross_validation()
{
    std::mt19937_64 gen(20241016);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const PMEParameters p(1.01 + 3 * U(gen), 1 + int(4 * U(gen)));
        const double M = 0.1 + 3 * U(gen);
        const double Mt = M * (0.05 + 0.95 * U(gen));
        const double K = 2 * U(gen);
        const double t1 = 0.01 + 2 * U(gen);
        const double t2 = t1 + 0.01 + 2 * U(gen);
        const double rho = 3 * U(gen);
        const double alpha = 1.01 + 4 * U(gen);
        for (auto c : {Corollary::cor12, Corollary::cor14, Corollary::cor16, Corollary::cor18}) {
            const HarnackInputs in{c, p, M, Mt, K, rho, t1, t2, alpha};
            const double closed = harnack_closed_form_log(in);
            worst = std::max(worst, std::abs(closed - harnack_matched_quadrature(in)) / std::max(1.0, std::abs(closed)));
        }
    }
    // a = 1/2 (n = 1, m = 3), (m-1)MK = 1 (M = 1, K = 1/2)
    const PMEParameters half(3.0, 1);
    auto in = [&](Corollary c) { return HarnackInputs{c, half, 1.0, 1.0, 0.5, 0.0, 1.0, 2.0, 2.0}; };
    const A1A2 f = a1_a2(half, 1.0, 0.5, 1.0, 2.0);
    const double worked[][2] = {{harnack_closed_form(in(Corollary::cor12)), 3.2974426},
                                {harnack_closed_form_log(in(Corollary::cor14)), 11.8022736},
                                {f.A1, 1.8334694},
                                {f.A2, 0.7615942},
                                {harnack_closed_form(in(Corollary::cor18)), 1.7410949}};
    double worked_err = 0.0;
    for (const auto& w : worked)
        worked_err = std::max(worked_err, std::abs(w[0] - w[1]));
    return {worst < 1e-8 && worked_err < 1e-6,
            "max |log closed - quadrature| " + fmt("%.2e", worst) + " over 4000 draws, worked values within " +
                fmt("%.1e", worked_err)};
}

// 5. m -> 1 limits
Outcome heat_limits()
{
    bool ok = true;
    std::string detail;
    const auto eps = dyadic_eps(2, 12);
    struct Case {
        ProfileKind kind;
        double K, t;
        std::optional<double> alpha;
        double expected_phi;
        double expected_alpha;
    };
    const double x = 1.0; // K t for the Li-Xu cases
    const Case cases[] = {
        {ProfileKind::constant_alpha_davies, 1.0, 1.0, 2.0, 6.0, 2.0},
        {ProfileKind::hamilton, 1.0, 0.5, std::nullopt, 2.0 * std::exp(2.0), std::exp(1.0)},
        {ProfileKind::lixu_hyperbolic, 1.0, 1.0, std::nullopt, 1.0 * (1.0 / std::tanh(x) + 1.0),
         1.0 + (std::cosh(x) * std::sinh(x) - x) / std::pow(std::sinh(x), 2)},
        {ProfileKind::lixu_linear, 1.0, 1.0, std::nullopt, 1.0 * (1.0 + 1.0 + 1.0 / 3.0), 1.0 + 2.0 / 3.0},
    };
    for (const Case& c : cases) {
        const HeatLimit lim = heat_equation_limit(c.kind, 2, c.K, c.t, c.alpha);
        const bool values = std::abs(lim.phi - c.expected_phi) < 1e-12 * c.expected_phi &&
                            std::abs(lim.alpha - c.expected_alpha) < 1e-12;
        const auto pts = limit_convergence(c.kind, 2, c.K, c.t, c.alpha, eps);
        double worst = 0.0;
        for (std::size_t j = 1; j < pts.size(); ++j)
            worst = std::max(worst, std::abs(pts[j].phi_error / pts[j - 1].phi_error - 0.5));
        ok = ok && values && worst <= 0.1;
        detail += std::string(to_string(c.kind)) + " limit " + fmt("%.7g", lim.phi) + " ratio dev " + fmt("%.3f", worst) + "; ";
    }
    return {ok, detail};
}

// 6. Dominance of the sharpened constants
Outcome dominance()
{
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    long violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const PMEParameters p(1.0 + 1e-3 + 3 * U(gen), 1 + int(5 * U(gen)));
        const double M = 1e-2 + 5 * U(gen);
        const double K = i % 20 == 0 ? 0.0 : 5 * U(gen);
        const double alpha = 1.0 + 1e-3 + 5 * U(gen);
        const double c = (p.m() - 1) * M * K;
        const double t = K > 0 && i % 2 ? U(gen) / c : 1e-3 + 10 * U(gen);
        if (!(t > 0))
            continue;
        const double davies = make_profile(ProfileKind::constant_alpha_davies, p, M, K, alpha).phi(t);
        const double lnvv = make_profile(ProfileKind::lnvv_baseline, p, M, K, alpha).phi(t);
        if (K == 0.0 ? davies != lnvv : !(davies < lnvv))
            ++violations;
        if (K > 0.0 && c * t <= 1.0) {
            const double small_time = 2 * p.a() * c + p.a() / t;
            const double hyp = make_profile(ProfileKind::lixu_hyperbolic, p, M, K).phi(t);
            if (hyp > small_time * (1 + 1e-14) || small_time > lnvv || hyp > lnvv)
                ++violations;
        }
    }
    return {violations == 0, std::to_string(violations) + " violations in 10000 draws"};
}

// 7. Solver convergence and mass conservation on Barenblatt-interior data
Outcome solver_verification()
{
    const ManifoldModel model = ManifoldModel::flat(1);
    const PMEParameters params(2.0, 1);
    const auto u0 = [](double r) { return barenblatt(1, 2.0, 1.0, r, 1.0) + 1e-3; };
    double drift = 0.0;
    auto residual = [&](int nr, double tau_out, int substeps, double T) {
        const int nt = static_cast<int>(std::lround((T - 1.0) / tau_out)) + 1;
        const SolveResult res = solve_radial(model, params, u0, GridSpec{6.0, nr, 1.0, T, nt, substeps});
        drift = std::max(drift, res.diagnostics.max_relative_mass_drift);
        const PressureField pf = pressure_field(res.field);
        Region interior;
        interior.r_hi = 2.0;
        interior.t_lo = 1.1;
        interior.t_hi = T - 0.5 * tau_out;
        return max_abs_in(pf, pressure_identity_residual(pf), interior);
    };
    std::vector<double> eh, et;
    for (int nr : {31, 61, 121})
        eh.push_back(residual(nr, 1e-3, 200, 1.2));
    for (double tau : {0.02, 0.01, 0.005})
        et.push_back(residual(961, tau, 1, 1.5));
    double order_h = 1e9, order_t = 1e9;
    for (std::size_t j = 1; j < 3; ++j) {
        order_h = std::min(order_h, std::log2(eh[j - 1] / eh[j]));
        order_t = std::min(order_t, std::log2(et[j - 1] / et[j]));
    }
    return {order_h >= 1.8 && order_t >= 0.9 && drift < 1e-6,
            "order in h " + fmt("%.2f", order_h) + ", order in tau " + fmt("%.2f", order_t) + ", max mass drift " +
                fmt("%.1e", drift)};
}

// 8. Evolution identity for the Li-Yau quantity
Outcome evolution_identity()
{
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<SamplePoint> samples;
    for (int i = 0; i < 50; ++i) {
        const double t = 0.5 + 2 * U(gen);
        samples.push_back({(0.05 + 0.8 * U(gen)) * barenblatt_front(1, 2.0, t, 1.0), t});
    }
    const auto flat = lemma21_residual(
        ManifoldModel::flat(1), PMEParameters(2.0, 1),
        [](double r, double t) { return barenblatt_pressure_jet(1, 2.0, 1.0, r, t); }, constant_coefficients(1.0, 0.0),
        samples);
    double worst = 0.0;
    for (const auto& s : flat)
        worst = std::max(worst, std::abs(s.difference));

    const ManifoldModel hyp = ManifoldModel::hyperbolic(2, 1.0);
    const PMEParameters params(2.0, 2);
    auto field = [&](double r, double) {
        const RadialJet f{2.0 + 0.5 * std::cos(r), -0.5 * std::sin(r), -0.5 * std::cos(r), 0.5 * std::sin(r),
                          0.5 * std::cos(r)};
        return pressure_equation_jet(hyp, params, f, r);
    };
    std::vector<SamplePoint> hs;
    for (int i = 0; i < 50; ++i)
        hs.push_back({0.1 + 0.06 * i, 1.0});
    LemmaOptions drop;
    drop.drop_ricci = true;
    double with = 0.0;
    double control = 0.0;
    for (const auto& s : lemma21_residual(hyp, params, field, constant_coefficients(1.5, 0.0), hs))
        with = std::max(with, std::abs(s.difference));
    for (const auto& s : lemma21_residual(hyp, params, field, constant_coefficients(1.5, 0.0), hs, drop))
        control = std::max(control, std::abs(s.difference));
    return {worst < 1e-6 && with < 1e-6 && control > 1e-2,
            "Barenblatt max difference " + fmt("%.1e", worst) + ", hyperbolic " + fmt("%.1e", with) +
                ", Ricci-dropped control " + fmt("%.2e", control)};
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double budget;
        std::function<Outcome()> run;
    };
    double sharpness_runtime = 0.0;
    const std::vector<Criterion> criteria = {
        {1, "Aronson-Benilan sharpness", 30.0, [&] { return sharpness(sharpness_runtime); }},
        {2, "noncompact bound suite", 60.0, noncompact_suite},
        {3, "ODE residuals", 1.0, ode_systems},
        {4, "Harnack cross-validation", 5.0, harnack_cross_validation},
        {5, "m->1 limit reproduction", 1.0, heat_limits},
        {6, "bound dominance", 1.0, dominance},
        {7, "solver verification", 30.0, solver_verification},
        {8, "evolution identity", 1.0, evolution_identity},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out{false, ""};
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget;
        const bool pass = out.pass && in_time;
        failures += !pass;
        std::printf("%s criterion %d (%s): %s[%.2fs of %.0fs]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str(), secs, c.budget);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
