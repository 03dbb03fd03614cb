#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pme/solver.hpp"

namespace pme {

// Space-time derivatives of a radial pressure at one point, enough to
// differentiate the Li-Yau quantity F twice in r and once in t.
struct PressureJet {
    double v = 0.0;
    double v_r = 0.0;
    double v_rr = 0.0;
    double v_rrr = 0.0;
    double v_t = 0.0;
    double v_rt = 0.0;
    double v_rrt = 0.0;
    double v_tt = 0.0;
};

using PressureJetField = std::function<PressureJet(double r, double t)>;

// Exact jet of the Barenblatt pressure in flat R^n (inside the support).
PressureJet barenblatt_pressure_jet(int n, double m, double C, double r, double t);

// Spatial derivatives v, v', ..., v'''' of a radial profile at one radius.
struct RadialJet {
    double v;
    double d1;
    double d2;
    double d3;
    double d4;
};

// Completes a spatial profile into a space-time jet by taking the time
// derivatives from the pressure equation v_t = (m-1) v Lap v + |grad v|^2,
// i.e. the jet of the solution passing through this profile. Requires r > 0.
PressureJet pressure_equation_jet(const ManifoldModel& model, const PMEParameters& params,
                                  const RadialJet& profile, double r);

// alpha(t), phi(t) and their derivatives.
struct TimeCoefficients {
    std::function<double(double)> alpha;
    std::function<double(double)> dalpha;
    std::function<double(double)> phi;
    std::function<double(double)> dphi;
};

TimeCoefficients constant_coefficients(double alpha, double phi);

struct SamplePoint {
    double r;
    double t;
};

struct LemmaSample {
    double r;
    double t;
    double direct;        // L(F) from differentiating F
    double identity;      // right-hand side of the evolution identity
    double difference;    // direct - identity
    double pressure_residual;
};

struct LemmaOptions {
    bool drop_ricci = false;
    // relative tolerance on the pressure-equation residual at each sample
    double pressure_tolerance = 1e-8;
};

// Evaluates L(F), L = d/dt - (m-1) v Lap, for F = |grad v|^2/v - alpha v_t/v - phi
// both directly and through the identity
//   -2(m-1)|Hess v|^2 - 2(m-1)Ric(grad v, grad v) + 2m <grad v, grad F>
//   - ((m-1)Lap v)^2 + (1-alpha)(v_t/v)^2 - alpha' v_t/v - phi'.
// Throws ParameterError if v violates the pressure equation at a sample.
std::vector<LemmaSample> lemma21_residual(const ManifoldModel& model, const PMEParameters& params,
                                          const PressureJetField& field,
                                          const TimeCoefficients& coeffs,
                                          std::span<const SamplePoint> samples,
                                          const LemmaOptions& options = {});

} // namespace pme
