#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>

#include "pme/errors.hpp"
#include "pme/harness.hpp"
#include "pme/pressure.hpp"

namespace pme {

namespace {

struct RunContext {
    const Scenario& scenario;
    ManifoldModel model;
    PMEParameters params;
    const PressureField* pf = nullptr;
    std::vector<char> mask;
    double h = 0.0;
    double tau = 0.0;
    double origin = 0.0;

    // explicit bound_slack, or 5 (h^2 + tau) times the given scale
    double bound_tolerance(double scale) const
    {
        if (scenario.tolerances.bound_slack)
            return *scenario.tolerances.bound_slack;
        return 5.0 * (h * h + tau) * std::max(scale, 0.0);
    }

    NodeSelection selection() const
    {
        NodeSelection sel;
        sel.time_origin = origin;
        sel.mask = mask;
        return sel;
    }
};

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

CheckStatus status_for(double worst_slack, double tolerance)
{
    return worst_slack < -tolerance ? CheckStatus::fail : CheckStatus::pass;
}

void fill_from_deficit(CheckRecord& rec, const PressureField& pf, const DeficitField& d)
{
    rec.worst_slack = d.min_slack;
    rec.r = d.r_at_min;
    rec.t = d.t_at_min;
    for (std::size_t k = 0; k < pf.nt(); ++k) {
        for (std::size_t i = 0; i < pf.nr(); ++i) {
            const std::size_t idx = pf.index(k, i);
            if (std::isnan(d.slack[idx]))
                continue;
            rec.plot.push_back({pf.r[i], pf.t[k], d.lhs[idx], d.rhs[idx], d.slack[idx]});
        }
    }
    rec.details["checked_nodes"] = d.checked;
    rec.details["excluded_nonpositive_time"] = d.excluded_nonpositive_time;
    rec.details["max_rhs"] = d.max_rhs;
}

std::vector<CheckRecord> run_noncompact(const RunContext& ctx, const std::string& id, const NoncompactCheck& c)
{
    const PressureField& pf = *ctx.pf;
    const double K = ctx.model.ricci_bound();
    std::vector<std::optional<double>> alphas;
    if (uses_constant_alpha(c.profile))
        alphas.assign(c.alphas.begin(), c.alphas.end());
    else
        alphas.push_back(std::nullopt);

    std::vector<CheckRecord> out;
    for (const auto& alpha : alphas) {
        const EstimateProfile profile(c.profile, pf.params, pf.sup, K, alpha);
        const DeficitField d = li_yau_deficit(pf, profile, ctx.selection());
        CheckRecord rec;
        rec.id = alpha ? id + "/alpha=" + format_number(*alpha) : id;
        rec.kind = "noncompact_bound";
        fill_from_deficit(rec, pf, d);
        rec.tolerance = ctx.bound_tolerance(d.max_rhs);
        rec.status = status_for(rec.worst_slack, rec.tolerance);
        rec.details["profile"] = to_string(c.profile);
        if (alpha)
            rec.details["alpha"] = *alpha;
        rec.details["M"] = pf.sup;
        rec.details["K"] = K;
        rec.details["time_origin"] = ctx.origin;
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<CheckRecord> run_local(const RunContext& ctx, const std::string& id, const LocalCheck& c)
{
    const PressureField& pf = *ctx.pf;
    const double K = ctx.model.ricci_bound();
    const bool measured = !c.c_grad;
    double c_grad = c.c_grad.value_or(0.0);
    double c_lap = c.c_lap.value_or(0.0);
    if (measured) {
        const CutoffFunction cutoff = build_cutoff(ctx.model, c.R, pf.r);
        c_grad = cutoff.c_grad;
        c_lap = cutoff.c_lap;
    }
    const LocalBoundSpec spec{c.theorem, c.R, c_grad, c_lap, c.alpha};
    const DeficitField d = local_deficit(pf, spec, K, ctx.selection());
    CheckRecord rec;
    rec.id = id;
    rec.kind = "local_bound";
    fill_from_deficit(rec, pf, d);
    rec.tolerance = ctx.bound_tolerance(d.max_rhs);
    rec.status = measured ? CheckStatus::report_only : status_for(rec.worst_slack, rec.tolerance);
    rec.details["theorem"] = to_string(c.theorem);
    rec.details["R"] = c.R;
    rec.details["C_grad"] = c_grad;
    rec.details["C_lap"] = c_lap;
    rec.details["constants"] = measured ? "measured" : "supplied";
    if (c.alpha)
        rec.details["alpha"] = *c.alpha;
    rec.details["K"] = K;
    return {std::move(rec)};
}

std::vector<CheckRecord> run_harnack(const RunContext& ctx, const std::string& id, const HarnackCheck& c)
{
    const double quad_tol = ctx.scenario.tolerances.quadrature;
    CheckRecord rec;
    rec.id = id;
    rec.kind = "harnack";
    rec.worst_slack = std::numeric_limits<double>::infinity();
    rec.details["corollary"] = to_string(c.corollary);
    rec.details["source"] = c.from_field ? "field" : "formula";
    json pairs = json::array();

    double worst_disagreement = 0.0;
    for (const auto& p : c.pairs) {
        HarnackReport hr;
        if (c.from_field) {
            HarnackCheckOptions opt;
            opt.alpha_const = c.alpha;
            opt.time_origin = ctx.origin;
            opt.tolerance = ctx.scenario.tolerances.bound_slack.value_or(5.0 * (ctx.h * ctx.h + ctx.tau));
            hr = check_harnack(*ctx.pf, c.corollary, p.p1, p.p2, opt);
            rec.tolerance = std::log1p(opt.tolerance);
        } else {
            const HarnackInputs in{c.corollary, ctx.params, c.M, c.Mt, c.K, std::abs(p.p1.r - p.p2.r),
                                   p.p1.t,      p.p2.t,     c.alpha};
            hr = harnack_formula_report(in, p.p1, p.p2);
            rec.tolerance = quad_tol;
        }
        const double disagreement =
            std::abs(hr.log_closed_form - hr.quadrature_exponent) / std::max(1.0, std::abs(hr.log_closed_form));
        worst_disagreement = std::max(worst_disagreement, disagreement);
        if (c.from_field && disagreement > quad_tol)
            throw NumericError("closed form and quadrature disagree by " + format_number(disagreement));

        const double slack = c.from_field ? hr.slack : -disagreement;
        if (slack < rec.worst_slack) {
            rec.worst_slack = slack;
            rec.r = p.p1.r;
            rec.t = p.p1.t;
        }
        json jp = {{"r1", p.p1.r}, {"t1", p.p1.t}, {"r2", p.p2.r}, {"t2", p.p2.t},
                   {"rho", hr.rho}, {"M", hr.M}, {"Mtilde", hr.Mt}, {"K", hr.K},
                   {"closed_form_factor", hr.closed_form_factor}, {"quadrature_factor", hr.quadrature_factor},
                   {"log_closed_form", hr.log_closed_form}, {"quadrature_exponent", hr.quadrature_exponent}};
        if (hr.measured_ratio) {
            jp["measured_ratio"] = *hr.measured_ratio;
            jp["slack"] = hr.slack;
        }
        if (c.corollary == Corollary::cor16) {
            const double t1 = c.from_field ? p.p1.t - ctx.origin : p.p1.t;
            const double t2 = c.from_field ? p.p2.t - ctx.origin : p.p2.t;
            const A1A2 f = a1_a2(ctx.params, hr.M, hr.K, t1, t2);
            jp["A1"] = f.A1;
            jp["A2"] = f.A2;
            jp["small_rate_limit"] = f.limit_branch;
        }
        pairs.push_back(std::move(jp));
    }
    rec.details["pairs"] = std::move(pairs);
    rec.details["max_quadrature_disagreement"] = worst_disagreement;
    if (c.alpha)
        rec.details["alpha"] = *c.alpha;
    rec.status = status_for(rec.worst_slack, rec.tolerance);
    return {std::move(rec)};
}

std::vector<CheckRecord> run_ode(const RunContext& ctx, const std::string& id, const OdeCheck& c)
{
    const EstimateProfile profile(c.kind, ctx.params, c.M, c.K);
    CheckRecord rec;
    rec.id = id;
    rec.kind = "ode_residual";
    rec.tolerance = ctx.scenario.tolerances.ode;
    double worst = 0.0;
    double worst_t = c.t_min;
    const double l0 = std::log(c.t_min);
    const double l1 = std::log(c.t_max);
    for (int j = 0; j < c.t_count; ++j) {
        const double t = c.t_count == 1 ? c.t_min : std::exp(l0 + (l1 - l0) * j / (c.t_count - 1));
        const OdeResidual res = ode_residual(profile, t);
        const double e = std::max(std::abs(res.relative1()), std::abs(res.relative2()));
        if (!(e <= worst)) {
            worst = e;
            worst_t = t;
        }
    }
    rec.worst_slack = -worst;
    rec.r = 0.0;
    rec.t = worst_t;
    rec.status = status_for(rec.worst_slack, rec.tolerance);
    rec.details["profile"] = to_string(c.kind);
    rec.details["rate"] = profile.rate();
    rec.details["t_count"] = c.t_count;
    rec.details["max_relative_residual"] = worst;
    return {std::move(rec)};
}

std::vector<CheckRecord> run_limit(const RunContext& ctx, const std::string& id, const LimitCheck& c)
{
    const int n = ctx.scenario.manifold.n;
    const auto points = limit_convergence(c.kind, n, c.K, c.t, c.alpha, dyadic_eps(c.k_first, c.k_last));
    const HeatLimit limit = heat_equation_limit(c.kind, n, c.K, c.t, c.alpha);
    CheckRecord rec;
    rec.id = id;
    rec.kind = "limit_study";
    rec.tolerance = 0.0;
    rec.worst_slack = std::numeric_limits<double>::infinity();
    rec.r = 0.0;
    rec.t = c.t;
    json table = json::array();
    for (std::size_t j = 0; j < points.size(); ++j) {
        const LimitPoint& p = points[j];
        json row = {{"eps", p.eps}, {"alpha", p.alpha}, {"phi_times_M", p.phi_times_M},
                    {"alpha_error", p.alpha_error}, {"phi_error", p.phi_error}};
        if (j > 0) {
            // empirical order: each halving of eps should halve the error
            for (const char* key : {"phi", "alpha"}) {
                const double prev = key[0] == 'p' ? points[j - 1].phi_error : points[j - 1].alpha_error;
                const double cur = key[0] == 'p' ? p.phi_error : p.alpha_error;
                if (!(prev > 0.0) || !(cur > 0.0))
                    continue;
                const double ratio = cur / prev;
                row[std::string(key) + "_ratio"] = ratio;
                const double slack = 0.1 - std::abs(ratio - 0.5);
                if (slack < rec.worst_slack)
                    rec.worst_slack = slack;
            }
        }
        table.push_back(std::move(row));
    }
    rec.status = status_for(rec.worst_slack, rec.tolerance);
    rec.details["profile"] = to_string(c.kind);
    rec.details["limit_alpha"] = limit.alpha;
    rec.details["limit_phi"] = limit.phi;
    rec.details["table"] = std::move(table);
    return {std::move(rec)};
}

std::vector<CheckRecord> run_identity(const RunContext& ctx, const std::string& id, const IdentityCheck& c)
{
    const PressureField& pf = *ctx.pf;
    const ResidualField res = pressure_identity_residual(pf);
    CheckRecord rec;
    rec.id = id;
    rec.kind = "identity_residual";
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t k = 1; k + 1 < pf.nt(); ++k) {
        for (std::size_t i = 0; i + 1 < pf.nr(); ++i) {
            const std::size_t idx = pf.index(k, i);
            if (!ctx.mask.empty() && !ctx.mask[idx])
                continue;
            scale = std::max(scale, std::abs(pf.v_t[idx]));
            if (std::abs(res.values[idx]) >= worst) {
                worst = std::abs(res.values[idx]);
                rec.r = pf.r[i];
                rec.t = pf.t[k];
            }
        }
    }
    rec.worst_slack = -worst;
    // round-off floor for fields whose derivatives vanish
    const double roundoff = 1e-10 * std::max(1.0, pf.sup * pf.sup);
    rec.tolerance = c.tolerance.value_or(ctx.bound_tolerance(scale) + roundoff);
    rec.status = status_for(rec.worst_slack, rec.tolerance);
    rec.details["max_abs_residual"] = worst;
    rec.details["max_abs_v_t"] = scale;
    return {std::move(rec)};
}

std::function<double(double)> initial_profile(const Scenario& s)
{
    const InitialData d = s.initial_data;
    const int n = s.manifold.n;
    const double m = s.m;
    switch (d.type) {
    case InitialData::Type::constant:
        return [d](double) { return d.c; };
    case InitialData::Type::gaussian_bump:
        return [d](double r) { return d.base + d.amplitude * std::exp(-r * r / (d.width * d.width)); };
    case InitialData::Type::barenblatt_shifted:
        return [d, n, m](double r) { return barenblatt(n, m, d.start_time, r, d.C) + d.floor; };
    }
    throw ConfigError("unknown initial data");
}

template <class F>
std::vector<CheckRecord> annotate(const std::string& id, F&& f)
{
    try {
        return f();
    } catch (const SolverError& e) {
        throw SolverError("check '" + id + "': " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("check '" + id + "': " + e.what());
    } catch (const DomainError& e) {
        throw DomainError("check '" + id + "': " + e.what());
    } catch (const ParameterError& e) {
        throw ParameterError("check '" + id + "': " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError("check '" + id + "': " + e.what());
    }
}

} // namespace

bool VerificationReport::all_pass() const
{
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckRecord& c) { return c.status == CheckStatus::fail; });
}

VerificationReport run_scenario(const Scenario& s)
{
    VerificationReport rep;
    rep.scenario = s.document;
    RunContext ctx{s, s.model(), s.params(), nullptr, {}, 0.0, 0.0, 0.0};
    ctx.origin = s.effective_time_origin();
    ctx.h = s.grid.r_max / (s.grid.nr - 1);
    ctx.tau = (s.grid.T - s.grid.t0) / (s.grid.nt - 1);

    std::optional<PressureField> pf;
    if (s.needs_solution()) {
        SolveResult solved = solve_radial(ctx.model, ctx.params, initial_profile(s), s.grid);
        rep.solver_invoked = true;
        rep.solver = solved.diagnostics;
        pf.emplace(pressure_field(solved.field));
        if (s.initial_data.type == InitialData::Type::barenblatt_shifted) {
            // nodes still sitting on the positivity floor carry no Barenblatt information
            const auto& u = solved.field.values();
            ctx.mask.resize(u.size());
            for (std::size_t j = 0; j < u.size(); ++j)
                ctx.mask[j] = u[j] >= 10.0 * s.initial_data.floor;
        }
        ctx.pf = &*pf;
    }

    std::vector<std::future<std::vector<CheckRecord>>> futures;
    futures.reserve(s.checks.size());
    for (const NamedCheck& check : s.checks) {
        futures.push_back(std::async(std::launch::async, [&ctx, &check] {
            return annotate(check.id, [&] {
                return std::visit(
                    [&](const auto& spec) -> std::vector<CheckRecord> {
                        using T = std::decay_t<decltype(spec)>;
                        if constexpr (std::is_same_v<T, NoncompactCheck>)
                            return run_noncompact(ctx, check.id, spec);
                        else if constexpr (std::is_same_v<T, LocalCheck>)
                            return run_local(ctx, check.id, spec);
                        else if constexpr (std::is_same_v<T, HarnackCheck>)
                            return run_harnack(ctx, check.id, spec);
                        else if constexpr (std::is_same_v<T, OdeCheck>)
                            return run_ode(ctx, check.id, spec);
                        else if constexpr (std::is_same_v<T, LimitCheck>)
                            return run_limit(ctx, check.id, spec);
                        else
                            return run_identity(ctx, check.id, spec);
                    },
                    check.spec);
            });
        }));
    }
    // collect in scenario order; the first failure is rethrown after all finish
    std::exception_ptr first_error;
    for (auto& f : futures) {
        try {
            auto records = f.get();
            for (auto& r : records)
                rep.checks.push_back(std::move(r));
        } catch (...) {
            if (!first_error)
                first_error = std::current_exception();
        }
    }
    if (first_error)
        std::rethrow_exception(first_error);
    return rep;
}

} // namespace pme
