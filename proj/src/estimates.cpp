#include "pme/estimates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "pme/errors.hpp"

namespace pme {

const char* to_string(ProfileKind kind)
{
    switch (kind) {
    case ProfileKind::constant_alpha_davies: return "constant_alpha_davies";
    case ProfileKind::lnvv_baseline: return "lnvv_baseline";
    case ProfileKind::hamilton: return "hamilton";
    case ProfileKind::lixu_hyperbolic: return "lixu_hyperbolic";
    case ProfileKind::lixu_linear: return "lixu_linear";
    }
    return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name)
{
    if (name == "constant_alpha_davies" || name == "davies") return ProfileKind::constant_alpha_davies;
    if (name == "lnvv_baseline" || name == "lnvv") return ProfileKind::lnvv_baseline;
    if (name == "hamilton") return ProfileKind::hamilton;
    if (name == "lixu_hyperbolic") return ProfileKind::lixu_hyperbolic;
    if (name == "lixu_linear") return ProfileKind::lixu_linear;
    throw ConfigError("unknown profile kind '" + name + "'");
}

bool uses_constant_alpha(ProfileKind kind)
{
    return kind == ProfileKind::constant_alpha_davies || kind == ProfileKind::lnvv_baseline;
}

namespace {

// Taylor coefficients of x coth x = 1 + sum_k c_k x^{2k}
constexpr std::array<double, 6> xcoth_series = {1.0 / 3.0,     -1.0 / 45.0,       2.0 / 945.0,
                                                -1.0 / 4725.0, 2.0 / 93555.0, -1382.0 / 638512875.0};
constexpr double series_threshold = 0.1;

// (x / sinh x)^2
double x_over_sinh_sq(double x)
{
    if (std::abs(x) < 1e-4)
        return 1.0 - x * x / 3.0;
    const double q = x / std::sinh(x);
    return q * q;
}

} // namespace

double xcoth_minus_one(double x)
{
    if (std::abs(x) < series_threshold) {
        const double x2 = x * x;
        double acc = 0.0;
        for (std::size_t k = xcoth_series.size(); k-- > 0;)
            acc = acc * x2 + xcoth_series[k];
        return acc * x2;
    }
    return x / std::tanh(x) - 1.0;
}

double xcoth_d1(double x)
{
    if (std::abs(x) < series_threshold) {
        const double x2 = x * x;
        double acc = 0.0;
        for (std::size_t k = xcoth_series.size(); k-- > 0;)
            acc = acc * x2 + 2.0 * (k + 1) * xcoth_series[k];
        return acc * x;
    }
    const double sh = std::sinh(x);
    return 1.0 / std::tanh(x) - x / sh / sh;
}

double xcoth_d2(double x)
{
    if (std::abs(x) < series_threshold) {
        const double x2 = x * x;
        double acc = 0.0;
        for (std::size_t k = xcoth_series.size(); k-- > 0;) {
            const double p = 2.0 * (k + 1);
            acc = acc * x2 + p * (p - 1.0) * xcoth_series[k];
        }
        return acc;
    }
    const double sh = std::sinh(x);
    return 2.0 * xcoth_minus_one(x) / sh / sh;
}

EstimateProfile::EstimateProfile(ProfileKind kind, PMEParameters params, double M, double K,
                                 std::optional<double> alpha_const)
    : kind_(kind), params_(params), M_(M), K_(K), alpha_const_(alpha_const)
{
    if (!(M > 0.0) || !std::isfinite(M))
        throw ParameterError("M must be positive");
    if (!(K >= 0.0) || !std::isfinite(K))
        throw ParameterError("K must be nonnegative");
    if (uses_constant_alpha(kind)) {
        if (!alpha_const || !(*alpha_const > 1.0))
            throw ParameterError(std::string(to_string(kind)) + " needs a constant alpha > 1");
    } else {
        alpha_const_.reset();
    }
    rate_ = (params_.m() - 1.0) * M_ * K_;
}

double EstimateProfile::alpha(double t) const
{
    const double c = rate_;
    switch (kind_) {
    case ProfileKind::constant_alpha_davies:
    case ProfileKind::lnvv_baseline:
        return *alpha_const_;
    case ProfileKind::hamilton:
        return std::exp(2.0 * c * t);
    case ProfileKind::lixu_hyperbolic:
        return 1.0 + xcoth_d1(c * t);
    case ProfileKind::lixu_linear:
        return 1.0 + 2.0 / 3.0 * c * t;
    }
    return 0.0;
}

double EstimateProfile::phi(double t) const
{
    const double a = params_.a();
    const double c = rate_;
    switch (kind_) {
    case ProfileKind::constant_alpha_davies: {
        const double al = *alpha_const_;
        return al * al / (2.0 * (al - 1.0)) * a * c + a * al * al / t;
    }
    case ProfileKind::lnvv_baseline: {
        const double al = *alpha_const_;
        return al * al / (al - 1.0) * a * c + a * al * al / t;
    }
    case ProfileKind::hamilton: {
        const double al = alpha(t);
        return a * al * al / t;
    }
    case ProfileKind::lixu_hyperbolic:
        // a c (coth(ct) + 1) written as (a/t) ct coth(ct) + a c
        return a / t * (1.0 + xcoth_minus_one(c * t)) + a * c;
    case ProfileKind::lixu_linear:
        return a / t + a * c + a / 3.0 * c * c * t;
    }
    return 0.0;
}

double EstimateProfile::dalpha(double t) const
{
    const double c = rate_;
    switch (kind_) {
    case ProfileKind::constant_alpha_davies:
    case ProfileKind::lnvv_baseline:
        return 0.0;
    case ProfileKind::hamilton:
        return 2.0 * c * std::exp(2.0 * c * t);
    case ProfileKind::lixu_hyperbolic:
        return c * xcoth_d2(c * t);
    case ProfileKind::lixu_linear:
        return 2.0 / 3.0 * c;
    }
    return 0.0;
}

double EstimateProfile::dphi(double t) const
{
    const double a = params_.a();
    const double c = rate_;
    switch (kind_) {
    case ProfileKind::constant_alpha_davies:
    case ProfileKind::lnvv_baseline: {
        const double al = *alpha_const_;
        return -a * al * al / (t * t);
    }
    case ProfileKind::hamilton: {
        const double al = alpha(t);
        return a * al * al * (4.0 * c / t - 1.0 / (t * t));
    }
    case ProfileKind::lixu_hyperbolic:
        return -a / (t * t) * x_over_sinh_sq(c * t);
    case ProfileKind::lixu_linear:
        return -a / (t * t) + a / 3.0 * c * c;
    }
    return 0.0;
}

TimeCoefficients EstimateProfile::coefficients() const
{
    const EstimateProfile self = *this;
    return {[self](double t) { return self.alpha(t); }, [self](double t) { return self.dalpha(t); },
            [self](double t) { return self.phi(t); }, [self](double t) { return self.dphi(t); }};
}

EstimateProfile make_profile(ProfileKind kind, const PMEParameters& params, double M, double K,
                             std::optional<double> alpha_const)
{
    return EstimateProfile(kind, params, M, K, alpha_const);
}

namespace {

template <class Rhs>
DeficitField evaluate_deficit(const PressureField& pf, const NodeSelection& sel,
                              const std::function<double(double)>& alpha, Rhs&& rhs_at)
{
    const std::size_t nr = pf.nr();
    const std::size_t nt = pf.nt();
    if (!sel.mask.empty() && sel.mask.size() != nr * nt)
        throw ConfigError("node mask does not match the pressure field");

    DeficitField out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.lhs.assign(nr * nt, nan);
    out.rhs.assign(nr * nt, nan);
    out.slack.assign(nr * nt, nan);
    for (std::size_t k = sel.skip_first_level ? 1 : 0; k < nt; ++k) {
        const double t = pf.t[k] - sel.time_origin;
        const bool valid_time = t > 0.0;
        const double al = valid_time ? alpha(t) : 0.0;
        const double rhs = valid_time ? rhs_at(t) : 0.0;
        for (std::size_t i = 0; i < nr; ++i) {
            if (sel.skip_outer_boundary && i + 1 == nr)
                continue;
            if (pf.r[i] > sel.ball_radius)
                continue;
            const std::size_t idx = pf.index(k, i);
            if (!sel.mask.empty() && !sel.mask[idx])
                continue;
            if (!valid_time) {
                ++out.excluded_nonpositive_time;
                continue;
            }
            const double v = pf.v[idx];
            const double lhs = pf.grad_sq[idx] / v - al * pf.v_t[idx] / v;
            const double slack = rhs - lhs;
            out.lhs[idx] = lhs;
            out.rhs[idx] = rhs;
            out.slack[idx] = slack;
            ++out.checked;
            if (std::isfinite(rhs))
                out.max_rhs = std::max(out.max_rhs, rhs);
            if (slack < out.min_slack) {
                out.min_slack = slack;
                out.r_at_min = pf.r[i];
                out.t_at_min = pf.t[k];
            }
        }
    }
    return out;
}

} // namespace

DeficitField li_yau_deficit(const PressureField& pf, const EstimateProfile& profile,
                            const NodeSelection& selection)
{
    if (profile.params().m() != pf.params.m() || profile.params().dimension() != pf.params.dimension())
        throw ParameterError("profile and pressure field use different PME parameters");
    if (profile.M() < pf.sup * (1.0 - 1e-12))
        throw ParameterError("profile M must dominate the supremum of the pressure field");
    return evaluate_deficit(pf, selection, [&](double t) { return profile.alpha(t); },
                            [&](double t) { return profile.phi(t); });
}

const char* to_string(LocalTheorem theorem)
{
    switch (theorem) {
    case LocalTheorem::thm11: return "thm11";
    case LocalTheorem::thm12: return "thm12";
    case LocalTheorem::thm13: return "thm13";
    case LocalTheorem::thm14: return "thm14";
    }
    return "unknown";
}

LocalTheorem local_theorem_from_string(const std::string& name)
{
    if (name == "thm11") return LocalTheorem::thm11;
    if (name == "thm12") return LocalTheorem::thm12;
    if (name == "thm13") return LocalTheorem::thm13;
    if (name == "thm14") return LocalTheorem::thm14;
    throw ConfigError("unknown local theorem '" + name + "'");
}

EstimateProfile local_profile(LocalTheorem theorem, const PMEParameters& params, double M, double K,
                              std::optional<double> alpha_const)
{
    switch (theorem) {
    case LocalTheorem::thm11:
        return EstimateProfile(ProfileKind::constant_alpha_davies, params, M, K, alpha_const);
    case LocalTheorem::thm12:
        return EstimateProfile(ProfileKind::hamilton, params, M, K);
    case LocalTheorem::thm13:
        return EstimateProfile(ProfileKind::lixu_hyperbolic, params, M, K);
    case LocalTheorem::thm14:
        return EstimateProfile(ProfileKind::lixu_linear, params, M, K);
    }
    throw ParameterError("unknown local theorem");
}

double local_bound(LocalTheorem theorem, const PMEParameters& params, double M, double K, double R,
                   double c_grad, double c_lap, double t, std::optional<double> alpha_const)
{
    if (!(R > 0.0) || !(t > 0.0))
        throw ParameterError("local bounds need R > 0 and t > 0");
    if (!(c_grad >= 0.0) || !(c_lap >= 0.0))
        throw ParameterError("cutoff constants must be nonnegative");
    if (theorem == LocalTheorem::thm11 && (!alpha_const || !(*alpha_const > 1.0)))
        throw ParameterError("thm11 needs a constant alpha > 1");
    if (!(M > 0.0) || !(K >= 0.0))
        throw ParameterError("local bounds need M > 0 and K >= 0");

    const double m = params.m();
    const double a = params.a();
    const double c = (m - 1.0) * M * K;
    const double R2 = R * R;
    // 1 + sqrt(K) R coth(sqrt(K) R): carries both the C/R^2 and the
    // C sqrt(K) coth(sqrt(K) R)/R terms
    const double curvature = cutoff_curvature_factor(K, R);
    const double inf = std::numeric_limits<double>::infinity();

    switch (theorem) {
    case LocalTheorem::thm11: {
        const double al = *alpha_const;
        const double first = a * al * al * m * std::sqrt(M) / std::sqrt(al - 1.0) * std::sqrt(c_grad) / R;
        const double bracket = 1.0 / t + c / (2.0 * (al - 1.0))
                               + (m - 1.0) * M * (c_lap * curvature + 2.0 * c_grad) / R2;
        const double root = first + std::sqrt(a) * al * std::sqrt(bracket);
        return root * root;
    }
    case LocalTheorem::thm12: {
        const double al = std::exp(2.0 * c * t);
        const double one_minus_inv = -std::expm1(-2.0 * c * t);
        if (one_minus_inv <= 0.0)
            return inf;
        return m * m * M * a * a * al * al * al / (2.0 * one_minus_inv) * c_grad / R2
               + (m - 1.0) * M * a * al * al * (c_lap * curvature + 2.0 * c_grad) / R2
               + a * al * al / t;
    }
    case LocalTheorem::thm13: {
        const double C = std::max(c_grad, c_lap);
        const double beta = std::tanh(c * t);
        const double last = beta > 0.0 ? a * a * m * m * C / (R2 * beta) : (C > 0.0 ? inf : 0.0);
        return (a * (m - 1.0) * C * curvature / R2 + last) * M;
    }
    case LocalTheorem::thm14: {
        const double C = std::max(c_grad, c_lap);
        const double al = 1.0 + 2.0 / 3.0 * c * t;
        const double beta = std::tanh(c * t);
        const double al2 = al * al;
        const double last = beta > 0.0 ? a * a * m * m * al2 * al2 / beta * C / R2 : (C > 0.0 ? inf : 0.0);
        return (a * (m - 1.0) * al2 * C * curvature / R2 + last) * M;
    }
    }
    return inf;
}

DeficitField local_deficit(const PressureField& pf, const LocalBoundSpec& spec, double K,
                           NodeSelection selection)
{
    // M over B_p(2R) and every time level
    Region outer;
    outer.r_hi = 2.0 * spec.R;
    const double M = extremal_values(pf, outer).sup;
    const EstimateProfile profile = local_profile(spec.theorem, pf.params, M, K, spec.alpha_const);
    const bool subtracts_phi = spec.theorem == LocalTheorem::thm13 || spec.theorem == LocalTheorem::thm14;
    selection.ball_radius = std::min(selection.ball_radius, spec.R);
    return evaluate_deficit(pf, selection, [&](double t) { return profile.alpha(t); }, [&](double t) {
        const double bound = local_bound(spec.theorem, pf.params, M, K, spec.R, spec.c_grad,
                                         spec.c_lap, t, spec.alpha_const);
        return subtracts_phi ? bound + profile.phi(t) : bound;
    });
}

OdeResidual ode_residual(const EstimateProfile& profile, double t)
{
    if (!(t > 0.0))
        throw ParameterError("ODE residuals need t > 0");
    const double a = profile.params().a();
    const double c = profile.rate();
    const double phi = profile.phi(t);
    const double dphi = profile.dphi(t);
    const double alpha = profile.alpha(t);
    const double dalpha = profile.dalpha(t);
    OdeResidual res{};
    switch (profile.kind()) {
    case ProfileKind::lixu_hyperbolic: {
        res.r1 = -((2.0 / a) * phi - 2.0 * c) * phi + phi * phi / a - dphi;
        res.scale1 = 3.0 * phi * phi / a + 2.0 * c * std::abs(phi) + std::abs(dphi);
        const double ratio = ((2.0 / a) * phi - dalpha) / ((2.0 / a) * phi - 2.0 * c);
        res.r2 = ratio - alpha;
        res.scale2 = std::max(std::abs(ratio), std::abs(alpha));
        return res;
    }
    case ProfileKind::lixu_linear: {
        const double g = 1.0 / t + c;
        res.r1 = -(2.0 / t) * phi + a * g * g - dphi;
        res.scale1 = (2.0 / t) * std::abs(phi) + a * g * g + std::abs(dphi);
        const double lhs = (2.0 * g - dalpha) * (t / 2.0);
        res.r2 = lhs - alpha;
        res.scale2 = std::max(std::abs(lhs), std::abs(alpha));
        return res;
    }
    default:
        throw ParameterError(std::string("no ODE system for profile kind ") + to_string(profile.kind()));
    }
}

HeatLimit heat_equation_limit(ProfileKind kind, int n, double K, double t,
                              std::optional<double> alpha_const)
{
    if (n < 1 || !(K >= 0.0) || !(t > 0.0))
        throw ParameterError("heat-equation limit needs n >= 1, K >= 0, t > 0");
    if (uses_constant_alpha(kind) && (!alpha_const || !(*alpha_const > 1.0)))
        throw ParameterError("constant-alpha limit needs alpha > 1");
    const double half_n = 0.5 * n;
    switch (kind) {
    case ProfileKind::constant_alpha_davies: {
        const double al = *alpha_const;
        return {al, n * al * al * K / (4.0 * (al - 1.0)) + n * al * al / (2.0 * t)};
    }
    case ProfileKind::lnvv_baseline: {
        const double al = *alpha_const;
        return {al, n * al * al * K / (2.0 * (al - 1.0)) + n * al * al / (2.0 * t)};
    }
    case ProfileKind::hamilton:
        return {std::exp(2.0 * K * t), std::exp(4.0 * K * t) * half_n / t};
    case ProfileKind::lixu_hyperbolic:
        // (nK/2)(coth(Kt) + 1)
        return {1.0 + xcoth_d1(K * t), half_n / t * (1.0 + xcoth_minus_one(K * t)) + half_n * K};
    case ProfileKind::lixu_linear:
        return {1.0 + 2.0 / 3.0 * K * t, half_n * (1.0 / t + K + K * K * t / 3.0)};
    }
    throw ParameterError("unknown profile kind");
}

std::vector<LimitPoint> limit_convergence(ProfileKind kind, int n, double K, double t,
                                          std::optional<double> alpha_const,
                                          const std::vector<double>& eps)
{
    const HeatLimit limit = heat_equation_limit(kind, n, K, t, alpha_const);
    std::vector<LimitPoint> out;
    out.reserve(eps.size());
    for (double e : eps) {
        if (!(e > 0.0))
            throw ParameterError("limit study needs positive eps");
        const double M = 1.0 / e;
        const EstimateProfile profile(kind, PMEParameters(1.0 + e, n), M, K, alpha_const);
        const double alpha = profile.alpha(t);
        const double phi_M = profile.phi(t) * M;
        out.push_back({e, alpha, phi_M, std::abs(alpha - limit.alpha), std::abs(phi_M - limit.phi)});
    }
    return out;
}

std::vector<double> dyadic_eps(int k_first, int k_last)
{
    std::vector<double> eps;
    for (int k = k_first; k <= k_last; ++k)
        eps.push_back(std::ldexp(1.0, -k));
    return eps;
}

} // namespace pme
