#include "pme/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "pme/errors.hpp"

namespace pme {

PMEParameters::PMEParameters(double m, int n) : m_(m), n_(n)
{
    if (!(m > 1.0) || !std::isfinite(m))
        throw ParameterError("diffusion exponent m must satisfy m > 1, got " + std::to_string(m));
    if (n < 1)
        throw ParameterError("dimension must be >= 1");
    const double nm = n * (m - 1.0);
    a_ = nm / (nm + 2.0);
}

std::vector<double> GridSpec::radii() const
{
    std::vector<double> r(nr);
    const double h = r_max / (nr - 1);
    for (int i = 0; i < nr; ++i)
        r[i] = i * h;
    r.back() = r_max;
    return r;
}

std::vector<double> GridSpec::times() const
{
    std::vector<double> t(nt);
    const double dt = (T - t0) / (nt - 1);
    for (int k = 0; k < nt; ++k)
        t[k] = t0 + k * dt;
    t.back() = T;
    return t;
}

SolutionField::SolutionField(ManifoldModel model, PMEParameters params, std::vector<double> r,
                             std::vector<double> t, std::vector<double> u)
    : model_(std::move(model)), params_(std::move(params)), r_(std::move(r)), t_(std::move(t)),
      u_(std::move(u))
{
    if (params_.dimension() != model_.dimension())
        throw ParameterError("PME parameters and manifold disagree on the dimension");
    if (u_.size() != r_.size() * t_.size())
        throw ConfigError("solution array does not match the grid");
    if (!std::is_sorted(r_.begin(), r_.end()) || !std::is_sorted(t_.begin(), t_.end()))
        throw ConfigError("grid nodes must be increasing");
    for (double value : u_) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw ConfigError("solution field must be strictly positive and finite");
    }
}

SolutionField sample_field(const ManifoldModel& model, const PMEParameters& params,
                           std::vector<double> r, std::vector<double> t,
                           const std::function<double(double, double)>& u)
{
    std::vector<double> values;
    values.reserve(r.size() * t.size());
    for (double tk : t)
        for (double ri : r)
            values.push_back(u(ri, tk));
    return SolutionField(model, params, std::move(r), std::move(t), std::move(values));
}

std::vector<double> cell_volumes(const ManifoldModel& model, std::span<const double> r)
{
    // 5-point Gauss-Legendre on each dual cell
    static constexpr std::array<double, 5> x = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> w = {0.2369268850561891, 0.4786286704993665,
                                                0.5688888888888889, 0.4786286704993665,
                                                0.2369268850561891};
    const int n = model.dimension();
    const std::size_t N = r.size();
    std::vector<double> vol(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double left = i == 0 ? r[0] : 0.5 * (r[i - 1] + r[i]);
        const double right = i + 1 == N ? r[N - 1] : 0.5 * (r[i] + r[i + 1]);
        const double mid = 0.5 * (left + right);
        const double half = 0.5 * (right - left);
        double acc = 0.0;
        for (std::size_t q = 0; q < x.size(); ++q)
            acc += w[q] * std::pow(warp(model, mid + half * x[q]).s, n - 1);
        vol[i] = half * acc;
    }
    return vol;
}

double discrete_mass(std::span<const double> volumes, std::span<const double> u)
{
    double mass = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        mass += volumes[i] * u[i];
    return mass;
}

namespace {

// Implicit step operator: V_i (w_i^{1/m} - u_old_i) - tau * div(A grad w)_i.
class ImplicitStep {
public:
    ImplicitStep(const ManifoldModel& model, double m, std::span<const double> r)
        : inv_m_(1.0 / m), volume_(cell_volumes(model, r)), conductance_(r.size() + 1, 0.0)
    {
        const int n = model.dimension();
        // conductance_[i] couples nodes i-1 and i; the two end faces carry zero flux
        for (std::size_t i = 1; i < r.size(); ++i) {
            const double face = 0.5 * (r[i - 1] + r[i]);
            conductance_[i] = std::pow(warp(model, face).s, n - 1) / (r[i] - r[i - 1]);
        }
    }

    const std::vector<double>& volumes() const { return volume_; }

    void residual(std::span<const double> w, std::span<const double> u_old, double tau,
                  std::vector<double>& f) const
    {
        const std::size_t N = w.size();
        for (std::size_t i = 0; i < N; ++i) {
            double flux = 0.0;
            if (i + 1 < N)
                flux += conductance_[i + 1] * (w[i + 1] - w[i]);
            if (i > 0)
                flux -= conductance_[i] * (w[i] - w[i - 1]);
            f[i] = volume_[i] * (std::pow(w[i], inv_m_) - u_old[i]) - tau * flux;
        }
    }

    // Solves J delta = -f with the tridiagonal Jacobian at w.
    void newton_direction(std::span<const double> w, double tau, const std::vector<double>& f,
                          std::vector<double>& delta) const
    {
        const std::size_t N = w.size();
        diag_.resize(N);
        upper_.resize(N);
        rhs_.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double left = conductance_[i];
            const double right = i + 1 < N ? conductance_[i + 1] : 0.0;
            diag_[i] = volume_[i] * inv_m_ * std::pow(w[i], inv_m_ - 1.0) + tau * (left + right);
            upper_[i] = -tau * right;
            rhs_[i] = -f[i];
        }
        // Thomas algorithm; the matrix is symmetric with lower[i] = upper[i-1]
        for (std::size_t i = 1; i < N; ++i) {
            const double factor = upper_[i - 1] / diag_[i - 1];
            diag_[i] -= factor * upper_[i - 1];
            rhs_[i] -= factor * rhs_[i - 1];
        }
        delta.resize(N);
        delta[N - 1] = rhs_[N - 1] / diag_[N - 1];
        for (std::size_t i = N - 1; i-- > 0;)
            delta[i] = (rhs_[i] - upper_[i] * delta[i + 1]) / diag_[i];
    }

private:
    double inv_m_;
    std::vector<double> volume_;
    std::vector<double> conductance_;
    mutable std::vector<double> diag_, upper_, rhs_;
};

double max_abs(const std::vector<double>& v)
{
    double out = 0.0;
    for (double x : v)
        out = std::max(out, std::abs(x));
    return out;
}

} // namespace

SolveResult solve_radial(const ManifoldModel& model, const PMEParameters& params,
                         const std::function<double(double)>& u0, const GridSpec& grid)
{
    if (params.dimension() != model.dimension())
        throw ParameterError("PME parameters and manifold disagree on the dimension");
    if (grid.nr < 5 || grid.nt < 2 || grid.substeps < 1)
        throw ConfigError("grid needs nr >= 5, nt >= 2 and substeps >= 1");
    if (!(grid.r_max > 0.0) || !(grid.T > grid.t0))
        throw ConfigError("grid needs r_max > 0 and T > t0");
    if (!model.admissible(grid.r_max))
        throw ConfigError("r_max lies outside the admissible range of the model");

    const std::vector<double> r = grid.radii();
    const std::vector<double> t = grid.times();
    const std::size_t N = r.size();
    const double m = params.m();

    std::vector<double> u(N);
    for (std::size_t i = 0; i < N; ++i) {
        u[i] = u0(r[i]);
        if (!(u[i] > 0.0) || !std::isfinite(u[i]))
            throw ConfigError("initial data must be strictly positive; u0(" + std::to_string(r[i])
                              + ") = " + std::to_string(u[i]));
    }

    ImplicitStep step(model, m, r);
    SolverDiagnostics diag;
    diag.initial_mass = discrete_mass(step.volumes(), u);

    std::vector<double> values;
    values.reserve(N * t.size());
    values.insert(values.end(), u.begin(), u.end());

    std::vector<double> w(N), f(N), delta(N), trial(N), f_trial(N);
    constexpr int max_iterations = 60;
    long step_index = 0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double tau = (t[k] - t[k - 1]) / grid.substeps;
        for (int sub = 0; sub < grid.substeps; ++sub, ++step_index) {
            for (std::size_t i = 0; i < N; ++i)
                w[i] = std::pow(u[i], m);
            step.residual(w, u, tau, f);
            int it = 0;
            for (;; ++it) {
                if (it == max_iterations)
                    throw SolverError("Newton iteration did not converge at step "
                                      + std::to_string(step_index) + " (t = "
                                      + std::to_string(t[k - 1] + sub * tau) + ")");
                step.newton_direction(w, tau, f, delta);
                const double f_norm = max_abs(f);
                double lambda = 1.0;
                for (;;) {
                    bool positive = true;
                    for (std::size_t i = 0; i < N; ++i) {
                        trial[i] = w[i] + lambda * delta[i];
                        positive = positive && trial[i] > 0.0;
                    }
                    if (positive) {
                        step.residual(trial, u, tau, f_trial);
                        if (max_abs(f_trial) <= f_norm || lambda < 1.0 / 64.0)
                            break;
                    }
                    lambda *= 0.5;
                    if (lambda < 1e-12)
                        throw SolverError("positivity lost at step " + std::to_string(step_index)
                                          + "; refine the grid or raise the floor of the data");
                }
                double update = 0.0;
                for (std::size_t i = 0; i < N; ++i)
                    update = std::max(update, std::abs(trial[i] - w[i]) / trial[i]);
                std::swap(w, trial);
                std::swap(f, f_trial);
                if (update < 1e-13)
                    break;
            }
            ++it;
            diag.newton_iterations += it;
            diag.max_newton_iterations = std::max(diag.max_newton_iterations, it);
            for (std::size_t i = 0; i < N; ++i) {
                u[i] = std::pow(w[i], 1.0 / m);
                if (!(u[i] > 0.0) || !std::isfinite(u[i]))
                    throw SolverError("positivity lost at step " + std::to_string(step_index)
                                      + "; refine the grid or raise the floor of the data");
            }
            const double mass = discrete_mass(step.volumes(), u);
            diag.max_relative_mass_drift = std::max(
                diag.max_relative_mass_drift, std::abs(mass - diag.initial_mass) / diag.initial_mass);
        }
        values.insert(values.end(), u.begin(), u.end());
    }
    diag.steps = step_index;
    diag.final_mass = discrete_mass(step.volumes(), u);

    return {SolutionField(model, params, r, t, std::move(values)), diag};
}

BarenblattConstants barenblatt_constants(int n, double m)
{
    const double b = 1.0 / (n * (m - 1.0) + 2.0);
    return {b, (m - 1.0) * b / (2.0 * m)};
}

double barenblatt(int n, double m, double t, double r, double C)
{
    if (!(t > 0.0) || !(m > 1.0) || !(C > 0.0))
        throw ParameterError("Barenblatt profile needs t > 0, m > 1, C > 0");
    const auto [b, k] = barenblatt_constants(n, m);
    const double inner = C - k * r * r * std::pow(t, -2.0 * b);
    if (inner <= 0.0)
        return 0.0;
    return std::pow(t, -n * b) * std::pow(inner, 1.0 / (m - 1.0));
}

double barenblatt_front(int n, double m, double t, double C)
{
    const auto [b, k] = barenblatt_constants(n, m);
    return std::sqrt(C / k) * std::pow(t, b);
}

} // namespace pme
