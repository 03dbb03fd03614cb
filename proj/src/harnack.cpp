#include "pme/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pme/errors.hpp"

namespace pme {

const char* to_string(Corollary corollary)
{
    switch (corollary) {
    case Corollary::cor12: return "cor12";
    case Corollary::cor14: return "cor14";
    case Corollary::cor16: return "cor16";
    case Corollary::cor18: return "cor18";
    }
    return "unknown";
}

Corollary corollary_from_string(const std::string& name)
{
    if (name == "cor12") return Corollary::cor12;
    if (name == "cor14") return Corollary::cor14;
    if (name == "cor16") return Corollary::cor16;
    if (name == "cor18") return Corollary::cor18;
    throw ConfigError("unknown corollary '" + name + "'");
}

ProfileKind corollary_profile(Corollary corollary)
{
    switch (corollary) {
    case Corollary::cor12: return ProfileKind::constant_alpha_davies;
    case Corollary::cor14: return ProfileKind::hamilton;
    case Corollary::cor16: return ProfileKind::lixu_hyperbolic;
    case Corollary::cor18: return ProfileKind::lixu_linear;
    }
    throw ParameterError("unknown corollary");
}

namespace {

constexpr double quadrature_rel_tol = 1e-9;

// int_{t1}^{t2} f(t) dt in s = ln t, which flattens the a/t behaviour of phi.
// The s-interval is mapped onto [0, 1]: the kronrod error estimate carries an
// absolute round-off floor per panel, so short intervals would otherwise recurse
// to full depth without ever meeting the relative tolerance.
template <class F>
double integrate_log_time(F&& f, double t1, double t2, const char* what)
{
    using boost::math::quadrature::gauss_kronrod;
    const double s1 = std::log(t1);
    const double len = std::log(t2) - s1;
    auto g = [&](double u) {
        const double t = std::exp(s1 + u * len);
        return f(t) * t * len;
    };
    double error = 0.0;
    double l1 = 0.0;
    const double value = gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 20, 1e-12, &error, &l1);
    if (!std::isfinite(value) || error > quadrature_rel_tol * std::max(l1, std::numeric_limits<double>::min())) {
        throw NumericError(std::string("quadrature of ") + what + " did not converge: estimated error "
                           + std::to_string(error) + " against magnitude " + std::to_string(l1));
    }
    return value;
}

void validate_times(double rho, double Mt, double t1, double t2)
{
    if (!(t1 > 0.0) || !(t2 >= t1) || !std::isfinite(t2))
        throw ParameterError("Harnack bounds need 0 < t1 < t2");
    if (!(Mt > 0.0))
        throw ParameterError("Harnack bounds need M tilde > 0");
    if (!(rho >= 0.0))
        throw ParameterError("Harnack bounds need rho >= 0");
    if (t1 == t2 && rho > 0.0)
        throw ParameterError("Harnack bounds need t1 < t2 when the points differ");
}

void validate(const HarnackInputs& in)
{
    validate_times(in.rho, in.Mt, in.t1, in.t2);
    if (in.t1 == in.t2)
        throw ParameterError("Harnack bounds need t1 < t2");
    if (!(in.M > 0.0) || in.M < in.Mt * (1.0 - 1e-12))
        throw ParameterError("Harnack bounds need M >= M tilde > 0");
    if (!(in.K >= 0.0))
        throw ParameterError("Harnack bounds need K >= 0");
    if (in.corollary == Corollary::cor12 && (!in.alpha_const || !(*in.alpha_const > 1.0)))
        throw ParameterError("cor12 needs a constant alpha > 1");
}

// g(x)/(2x^2) for g(x) = e^{2x} - 2x - 1
double g_over_two_x_sq(double x)
{
    // sum_k 2^{k+1} x^k/(k+2)!
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 20; ++k) {
        term *= 2.0 * x / (k + 2);
        sum += term;
    }
    return sum;
}

// ln g(x) - 2 ln x
double log_g_minus_two_log_x(double x)
{
    if (x < 0.1)
        return std::log(2.0) + std::log(g_over_two_x_sq(x));
    if (x < 20.0)
        return std::log(std::expm1(2.0 * x) - 2.0 * x) - 2.0 * std::log(x);
    return 2.0 * x + std::log1p(-(2.0 * x + 1.0) * std::exp(-2.0 * x)) - 2.0 * std::log(x);
}

} // namespace

double harnack_exponent_quadrature(const EstimateProfile& profile, double rho, double Mt, double t1,
                                   double t2)
{
    validate_times(rho, Mt, t1, t2);
    if (t1 == t2)
        return 0.0;
    const double dt = t2 - t1;
    const double int_phi_over_alpha =
        integrate_log_time([&](double t) { return profile.phi(t) / profile.alpha(t); }, t1, t2, "phi/alpha");
    if (rho == 0.0)
        return int_phi_over_alpha;
    const double int_alpha = integrate_log_time([&](double t) { return profile.alpha(t); }, t1, t2, "alpha");
    return rho * rho / (4.0 * Mt * dt * dt) * int_alpha + int_phi_over_alpha;
}

A1A2 a1_a2(const PMEParameters& params, double M, double K, double t1, double t2)
{
    if (!(t1 > 0.0) || !(t2 > t1))
        throw ParameterError("a1_a2 needs 0 < t1 < t2");
    if (!(M > 0.0) || !(K >= 0.0))
        throw ParameterError("a1_a2 needs M > 0 and K >= 0");
    const double a = params.a();
    const double c = (params.m() - 1.0) * M * K;
    const double x1 = c * t1;
    const double x2 = c * t2;
    A1A2 out{};
    out.limit_branch = c * t2 < 1e-6;
    // (a/2)(ln g(x2) - ln g(x1)) with the 2 ln(c t) parts combined into 2 ln(t2/t1)
    const double log_a1 =
        0.5 * a * (2.0 * std::log(t2 / t1) + log_g_minus_two_log_x(x2) - log_g_minus_two_log_x(x1));
    out.A1 = std::exp(log_a1);
    out.A2 = c > 0.0 ? (xcoth_minus_one(x2) - xcoth_minus_one(x1)) / (c * (t2 - t1)) : 0.0;
    return out;
}

double harnack_closed_form_log(const HarnackInputs& in)
{
    validate(in);
    const double a = in.params.a();
    const double c = (in.params.m() - 1.0) * in.M * in.K;
    const double dt = in.t2 - in.t1;
    const double rho_sq = in.rho * in.rho;
    switch (in.corollary) {
    case Corollary::cor12: {
        const double al = *in.alpha_const;
        return a * al * std::log(in.t2 / in.t1) + al * rho_sq / (4.0 * in.Mt * dt)
               + al / (2.0 * (al - 1.0)) * a * c * dt;
    }
    case Corollary::cor14: {
        // (e^{2c t2} - e^{2c t1})/(2c)
        const double span = c > 0.0 ? std::exp(2.0 * c * in.t1) * std::expm1(2.0 * c * dt) / (2.0 * c) : dt;
        return span * (rho_sq / (4.0 * in.Mt * dt * dt) + a / in.t1);
    }
    case Corollary::cor16: {
        const A1A2 f = a1_a2(in.params, in.M, in.K, in.t1, in.t2);
        return std::log(f.A1) + rho_sq * (1.0 + f.A2) / (4.0 * in.Mt * dt);
    }
    case Corollary::cor18: {
        const double ratio = std::log1p(2.0 * c * in.t2 / 3.0) - std::log1p(2.0 * c * in.t1 / 3.0);
        return a * std::log(in.t2 / in.t1) - 0.25 * a * ratio
               + rho_sq * (1.0 + c * (in.t2 + in.t1) / 3.0) / (4.0 * in.Mt * dt) + 0.5 * a * c * dt;
    }
    }
    throw ParameterError("unknown corollary");
}

double harnack_closed_form(const HarnackInputs& in)
{
    return std::exp(harnack_closed_form_log(in));
}

double harnack_matched_quadrature(const HarnackInputs& in)
{
    validate(in);
    const EstimateProfile profile(corollary_profile(in.corollary), in.params, in.M, in.K,
                                  in.corollary == Corollary::cor12 ? in.alpha_const : std::nullopt);
    if (in.corollary != Corollary::cor14)
        return harnack_exponent_quadrature(profile, in.rho, in.Mt, in.t1, in.t2);
    const double dt = in.t2 - in.t1;
    const double int_alpha =
        integrate_log_time([&](double t) { return profile.alpha(t); }, in.t1, in.t2, "alpha");
    return int_alpha * (in.rho * in.rho / (4.0 * in.Mt * dt * dt) + in.params.a() / in.t1);
}

HarnackReport harnack_formula_report(const HarnackInputs& in, SpaceTimePoint p1, SpaceTimePoint p2)
{
    HarnackReport rep{};
    rep.corollary = in.corollary;
    rep.p1 = p1;
    rep.p2 = p2;
    rep.rho = in.rho;
    rep.M = in.M;
    rep.Mt = in.Mt;
    rep.K = in.K;
    rep.log_closed_form = harnack_closed_form_log(in);
    rep.quadrature_exponent = harnack_matched_quadrature(in);
    rep.closed_form_factor = std::exp(rep.log_closed_form);
    rep.quadrature_factor = std::exp(rep.quadrature_exponent);
    rep.slack = std::numeric_limits<double>::infinity();
    rep.pass = true;
    return rep;
}

double interpolate_pressure(const PressureField& pf, double r, double t)
{
    const auto& R = pf.r;
    const auto& T = pf.t;
    if (R.size() < 2 || T.size() < 2)
        throw ConfigError("pressure field too small to interpolate");
    if (r < R.front() || r > R.back() || t < T.front() || t > T.back())
        throw DomainError("point (" + std::to_string(r) + ", " + std::to_string(t)
                          + ") lies outside the pressure field");
    auto bracket = [](const std::vector<double>& x, double q) {
        auto it = std::upper_bound(x.begin(), x.end(), q);
        std::size_t hi = static_cast<std::size_t>(it - x.begin());
        hi = std::clamp<std::size_t>(hi, 1, x.size() - 1);
        const std::size_t lo = hi - 1;
        const double w = (q - x[lo]) / (x[hi] - x[lo]);
        return std::pair<std::size_t, double>{lo, w};
    };
    const auto [i, wr] = bracket(R, r);
    const auto [k, wt] = bracket(T, t);
    const double v00 = pf.v[pf.index(k, i)];
    const double v01 = pf.v[pf.index(k, i + 1)];
    const double v10 = pf.v[pf.index(k + 1, i)];
    const double v11 = pf.v[pf.index(k + 1, i + 1)];
    return (1.0 - wt) * ((1.0 - wr) * v00 + wr * v01) + wt * ((1.0 - wr) * v10 + wr * v11);
}

HarnackReport check_harnack(const PressureField& pf, Corollary corollary, SpaceTimePoint p1,
                            SpaceTimePoint p2, const HarnackCheckOptions& options)
{
    if (!(p1.t < p2.t))
        throw ParameterError("check_harnack needs t1 < t2");
    const Extrema ext = extremal_values(pf, options.region);
    const HarnackInputs in{corollary,
                           pf.params,
                           ext.sup,
                           ext.inf,
                           pf.model.ricci_bound(),
                           geodesic_distance(pf.model, p1.r, p2.r),
                           p1.t - options.time_origin,
                           p2.t - options.time_origin,
                           options.alpha_const};
    HarnackReport rep = harnack_formula_report(in, p1, p2);
    const double ratio = interpolate_pressure(pf, p1.r, p1.t) / interpolate_pressure(pf, p2.r, p2.t);
    rep.measured_ratio = ratio;
    rep.slack = rep.log_closed_form - std::log(ratio);
    rep.pass = ratio <= rep.closed_form_factor * (1.0 + options.tolerance);
    return rep;
}

} // namespace pme
