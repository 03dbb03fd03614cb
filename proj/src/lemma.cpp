#include "pme/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pme/errors.hpp"

namespace pme {

PressureJet barenblatt_pressure_jet(int n, double m, double C, double r, double t)
{
    const PMEParameters params(m, n);
    const double a = params.a();
    const double k = barenblatt_constants(n, m).k;
    const double p = m / (m - 1.0);
    // v = p (C t^{-a} - k r^2 / t), using a + 2b = 1
    const double ta = std::pow(t, -a);
    PressureJet j;
    j.v = p * (C * ta - k * r * r / t);
    j.v_r = -2.0 * p * k * r / t;
    j.v_rr = -2.0 * p * k / t;
    j.v_rrr = 0.0;
    j.v_t = p * (-a * C * ta / t + k * r * r / (t * t));
    j.v_rt = 2.0 * p * k * r / (t * t);
    j.v_rrt = 2.0 * p * k / (t * t);
    j.v_tt = p * (a * (a + 1.0) * C * ta / (t * t) - 2.0 * k * r * r / (t * t * t));
    return j;
}

PressureJet pressure_equation_jet(const ManifoldModel& model, const PMEParameters& params,
                                  const RadialJet& f, double r)
{
    const auto [h, dh, d2h] = warp_log_derivative(model, r);
    const double nm1 = model.dimension() - 1.0;
    const double q = params.m() - 1.0;

    const double lap = f.d2 + nm1 * h * f.d1;
    const double lap_r = f.d3 + nm1 * (dh * f.d1 + h * f.d2);
    const double lap_rr = f.d4 + nm1 * (d2h * f.d1 + 2.0 * dh * f.d2 + h * f.d3);

    PressureJet j;
    j.v = f.v;
    j.v_r = f.d1;
    j.v_rr = f.d2;
    j.v_rrr = f.d3;
    j.v_t = q * f.v * lap + f.d1 * f.d1;
    j.v_rt = q * (f.d1 * lap + f.v * lap_r) + 2.0 * f.d1 * f.d2;
    j.v_rrt = q * (f.d2 * lap + 2.0 * f.d1 * lap_r + f.v * lap_rr)
              + 2.0 * (f.d2 * f.d2 + f.d1 * f.d3);
    const double lap_vt = j.v_rrt + nm1 * h * j.v_rt;
    j.v_tt = q * (j.v_t * lap + f.v * lap_vt) + 2.0 * f.d1 * j.v_rt;
    return j;
}

TimeCoefficients constant_coefficients(double alpha, double phi)
{
    return {[alpha](double) { return alpha; }, [](double) { return 0.0; },
            [phi](double) { return phi; }, [](double) { return 0.0; }};
}

std::vector<LemmaSample> lemma21_residual(const ManifoldModel& model, const PMEParameters& params,
                                          const PressureJetField& field,
                                          const TimeCoefficients& coeffs,
                                          std::span<const SamplePoint> samples,
                                          const LemmaOptions& options)
{
    const double m = params.m();
    const double q = m - 1.0;
    const double nm1 = model.dimension() - 1.0;

    std::vector<LemmaSample> out;
    out.reserve(samples.size());
    for (const SamplePoint& s : samples) {
        const PressureJet j = field(s.r, s.t);
        const double h = warp_log_derivative(model, s.r).h;
        const double v = j.v;
        if (!(v > 0.0))
            throw ParameterError("manufactured pressure must be positive at the samples");

        const double lap = j.v_rr + nm1 * h * j.v_r;
        const double pressure_residual = j.v_t - q * v * lap - j.v_r * j.v_r;
        const double scale = std::max({std::abs(j.v_t), std::abs(q * v * lap), j.v_r * j.v_r, 1e-300});
        if (std::abs(pressure_residual) > options.pressure_tolerance * scale)
            throw ParameterError("manufactured pressure violates v_t = (m-1) v Lap v + |grad v|^2 at r = "
                                 + std::to_string(s.r) + ", t = " + std::to_string(s.t));

        const double alpha = coeffs.alpha(s.t);
        const double dalpha = coeffs.dalpha(s.t);
        const double dphi = coeffs.dphi(s.t);

        const double v2 = v * v;
        const double v3 = v2 * v;
        const double p = j.v_t / v;

        // grad term Q = v_r^2 / v and time term P = v_t / v with their derivatives
        const double Q_t = 2.0 * j.v_r * j.v_rt / v - j.v_r * j.v_r * j.v_t / v2;
        const double P_t = j.v_tt / v - j.v_t * j.v_t / v2;
        const double Q_r = 2.0 * j.v_r * j.v_rr / v - j.v_r * j.v_r * j.v_r / v2;
        const double P_r = j.v_rt / v - j.v_t * j.v_r / v2;
        const double Q_rr = 2.0 * (j.v_rr * j.v_rr + j.v_r * j.v_rrr) / v
                            - 5.0 * j.v_r * j.v_r * j.v_rr / v2
                            + 2.0 * j.v_r * j.v_r * j.v_r * j.v_r / v3;
        const double P_rr = j.v_rrt / v - (2.0 * j.v_rt * j.v_r + j.v_t * j.v_rr) / v2
                            + 2.0 * j.v_t * j.v_r * j.v_r / v3;

        const double F_t = Q_t - dalpha * p - alpha * P_t - dphi;
        const double F_r = Q_r - alpha * P_r;
        const double F_rr = Q_rr - alpha * P_rr;
        const double lap_F = F_rr + nm1 * h * F_r;
        const double direct = F_t - q * v * lap_F;

        const HessianRicci hr = radial_hessian_and_ricci(model, j.v_r, j.v_rr, s.r);
        const double ricci = options.drop_ricci ? 0.0 : hr.ricci;
        const double identity = -2.0 * q * hr.hessian_sq - 2.0 * q * ricci + 2.0 * m * j.v_r * F_r
                                - (q * lap) * (q * lap) + (1.0 - alpha) * p * p - dalpha * p - dphi;

        out.push_back({s.r, s.t, direct, identity, direct - identity, pressure_residual});
    }
    return out;
}

} // namespace pme
