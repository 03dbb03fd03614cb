#include <algorithm>
#include <cmath>
#include <string>

#include "pme/errors.hpp"
#include "pme/geometry.hpp"

namespace pme {

CutoffProfile cutoff_profile(double x)
{
    if (x <= 1.0)
        return {1.0, 0.0, 0.0};
    if (x >= 2.0)
        return {0.0, 0.0, 0.0};
    const double y = x - 1.0;
    const double one_minus = 1.0 - y;
    return {one_minus * one_minus * (1.0 + 2.0 * y), -6.0 * y * one_minus, -6.0 + 12.0 * y};
}

double cutoff_curvature_factor(double K, double R)
{
    const double y = std::sqrt(K) * R;
    if (y < 1e-4)
        return 2.0 + y * y / 3.0;
    return 1.0 + y / std::tanh(y);
}

CutoffFunction build_cutoff(const ManifoldModel& model, double R, std::span<const double> grid)
{
    if (!(R > 0.0))
        throw ParameterError("cutoff radius R must be positive");
    if (grid.empty() || grid.front() > 0.0 || grid.back() < 2.0 * R * (1.0 - 1e-12))
        throw ConfigError("cutoff grid must cover [0, 2R]");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw ConfigError("cutoff grid must be increasing");
    const auto in_band = std::count_if(grid.begin(), grid.end(),
                                       [R](double r) { return r >= R && r <= 2.0 * R; });
    if (in_band < 16)
        throw ConfigError("cutoff grid resolves [R, 2R] with only " + std::to_string(in_band)
                          + " nodes; at least 16 are required");

    CutoffFunction cut;
    cut.R = R;
    cut.r.assign(grid.begin(), grid.end());
    cut.phi.resize(grid.size());
    cut.grad.resize(grid.size());
    cut.lap.resize(grid.size());

    const int n = model.dimension();
    const double factor = cutoff_curvature_factor(model.ricci_bound(), R);
    double c_grad = 0.0;
    double c_lap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        const CutoffProfile p = cutoff_profile(r / R);
        double lap = 0.0;
        if (r > 0.0) {
            const double grad = p.d1 / R;
            // only radii inside the model are sampled; the tail beyond 2R is identically zero
            lap = p.d2 / (R * R);
            if (grad != 0.0)
                lap += (n - 1) * warp_log_derivative(model, r).h * grad;
            cut.grad[i] = grad;
        }
        cut.phi[i] = p.value;
        cut.lap[i] = lap;
        if (p.value > 1e-12)
            c_grad = std::max(c_grad, cut.grad[i] * cut.grad[i] * R * R / p.value);
        c_lap = std::max(c_lap, -lap * R * R / factor);
    }
    cut.c_grad = c_grad;
    cut.c_lap = c_lap;
    return cut;
}

} // namespace pme
