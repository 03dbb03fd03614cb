#pragma once

#include <limits>
#include <vector>

#include "pme/solver.hpp"

namespace pme {

// Pressure v = m/(m-1) u^{m-1} and the derivatives entering the Li-Yau
// quantities, stored row-major (one row per time level).
struct PressureField {
    ManifoldModel model;
    PMEParameters params;
    std::vector<double> r;
    std::vector<double> t;
    std::vector<double> v;
    std::vector<double> v_r;
    std::vector<double> v_rr;
    std::vector<double> v_t;
    std::vector<double> lap;     // Laplacian of v
    std::vector<double> grad_sq; // |grad v|^2
    double sup = 0.0;            // M
    double inf = 0.0;            // M tilde

    std::size_t nr() const { return r.size(); }
    std::size_t nt() const { return t.size(); }
    std::size_t index(std::size_t k, std::size_t i) const { return k * r.size() + i; }
};

// Spatial derivatives use five-node stencils (centred, shifted inward at
// r_max, evenly reflected at r = 0); v_t uses three-node stencils.
PressureField pressure_field(const SolutionField& sol);

// Closed box in (r, t); nodes inside it form the region.
struct Region {
    double r_lo = -std::numeric_limits<double>::infinity();
    double r_hi = std::numeric_limits<double>::infinity();
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();

    bool contains(double r, double t) const { return r >= r_lo && r <= r_hi && t >= t_lo && t <= t_hi; }
};

struct Extrema {
    double sup;
    double inf;
};

Extrema extremal_values(const PressureField& pf, const Region& region = {});

struct ResidualField {
    std::vector<double> values; // v_t - (m-1) v lap v - |grad v|^2 per node
    double max_abs = 0.0;       // over nodes away from r_max and from the end time levels
};

ResidualField pressure_identity_residual(const PressureField& pf);

// Max |residual| over the nodes of a region.
double max_abs_in(const PressureField& pf, const ResidualField& res, const Region& region);

} // namespace pme
