#pragma once

#include <functional>
#include <vector>

#include "pme/geometry.hpp"

namespace pme {

// Diffusion exponent m > 1 and the derived constant a = n(m-1)/(n(m-1)+2).
class PMEParameters {
public:
    PMEParameters(double m, int n);

    double m() const { return m_; }
    int dimension() const { return n_; }
    double a() const { return a_; }

private:
    double m_;
    int n_;
    double a_;
};

// Uniform space-time grid: nr nodes on [0, r_max], nt output levels on
// [t0, T]; each output interval is split into `substeps` implicit steps.
struct GridSpec {
    double r_max = 1.0;
    int nr = 64;
    double t0 = 0.0;
    double T = 1.0;
    int nt = 64;
    int substeps = 1;

    std::vector<double> radii() const;
    std::vector<double> times() const;
};

// Positive radial solution sampled on a tensor grid; u is stored row-major
// with one row per time level.
class SolutionField {
public:
    SolutionField(ManifoldModel model, PMEParameters params, std::vector<double> r,
                  std::vector<double> t, std::vector<double> u);

    const ManifoldModel& model() const { return model_; }
    const PMEParameters& params() const { return params_; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& t() const { return t_; }
    const std::vector<double>& values() const { return u_; }

    std::size_t nr() const { return r_.size(); }
    std::size_t nt() const { return t_.size(); }
    double u(std::size_t k, std::size_t i) const { return u_[k * r_.size() + i]; }

private:
    ManifoldModel model_;
    PMEParameters params_;
    std::vector<double> r_;
    std::vector<double> t_;
    std::vector<double> u_;
};

// Samples a closed-form u(r, t) on the given grid.
SolutionField sample_field(const ManifoldModel& model, const PMEParameters& params,
                           std::vector<double> r, std::vector<double> t,
                           const std::function<double(double, double)>& u);

struct SolverDiagnostics {
    long steps = 0;
    long newton_iterations = 0;
    int max_newton_iterations = 0;
    double initial_mass = 0.0;
    double final_mass = 0.0;
    double max_relative_mass_drift = 0.0;
};

struct SolveResult {
    SolutionField field;
    SolverDiagnostics diagnostics;
};

// Finite-volume cell volumes int s(r)^{n-1} dr of the dual cells around
// each node; their weighted sum is the conserved discrete mass.
std::vector<double> cell_volumes(const ManifoldModel& model, std::span<const double> r);

double discrete_mass(std::span<const double> volumes, std::span<const double> u);

// Solves u_t = Lap(u^m) for a radial positive solution with zero flux at
// r = 0 and r = r_max. Each step is backward Euler in w = u^m, solved by a
// damped Newton iteration; steps that lose positivity are rejected with a
// SolverError.
SolveResult solve_radial(const ManifoldModel& model, const PMEParameters& params,
                         const std::function<double(double)>& u0, const GridSpec& grid);

// Barenblatt profile in flat R^n:
// u = t^{-n b} max(0, C - k r^2 t^{-2b})^{1/(m-1)}, b = 1/(n(m-1)+2), k = (m-1) b / (2m).
struct BarenblattConstants {
    double b;
    double k;
};
BarenblattConstants barenblatt_constants(int n, double m);
double barenblatt(int n, double m, double t, double r, double C);

// Radius of the Barenblatt support at time t.
double barenblatt_front(int n, double m, double t, double C);

} // namespace pme
