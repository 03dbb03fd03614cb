#include "pme/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pme/errors.hpp"

namespace pme {

const char* to_string(ManifoldKind kind)
{
    switch (kind) {
    case ManifoldKind::flat: return "flat";
    case ManifoldKind::hyperbolic: return "hyperbolic";
    case ManifoldKind::spherical: return "spherical";
    }
    return "unknown";
}

ManifoldKind manifold_kind_from_string(const std::string& name)
{
    if (name == "flat") return ManifoldKind::flat;
    if (name == "hyperbolic") return ManifoldKind::hyperbolic;
    if (name == "spherical") return ManifoldKind::spherical;
    throw ConfigError("unknown manifold kind '" + name + "'");
}

ManifoldModel ManifoldModel::flat(int n)
{
    return make(ManifoldKind::flat, n, 0.0);
}

ManifoldModel ManifoldModel::hyperbolic(int n, double kappa)
{
    return make(ManifoldKind::hyperbolic, n, kappa);
}

ManifoldModel ManifoldModel::spherical(int n, double kappa)
{
    return make(ManifoldKind::spherical, n, kappa);
}

ManifoldModel ManifoldModel::make(ManifoldKind kind, int n, double kappa)
{
    if (n < 1)
        throw ParameterError("manifold dimension must be >= 1, got " + std::to_string(n));
    if (kind == ManifoldKind::flat)
        return ManifoldModel(kind, n, 0.0);
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw ParameterError("curvature magnitude kappa must be positive and finite for "
                             + std::string(to_string(kind)) + " models");
    return ManifoldModel(kind, n, kappa);
}

double ManifoldModel::ricci_bound() const
{
    return kind_ == ManifoldKind::hyperbolic ? (n_ - 1) * kappa_ : 0.0;
}

double ManifoldModel::max_radius() const
{
    if (kind_ == ManifoldKind::spherical)
        return std::numbers::pi / std::sqrt(kappa_);
    return std::numeric_limits<double>::infinity();
}

bool ManifoldModel::admissible(double r) const
{
    return r >= 0.0 && r < max_radius();
}

namespace {

void require_admissible(const ManifoldModel& model, double r)
{
    if (!model.admissible(r))
        throw DomainError("radius " + std::to_string(r) + " outside admissible range of the "
                          + to_string(model.kind()) + " model");
}

void require_positive_radius(const ManifoldModel& model, double r)
{
    require_admissible(model, r);
    if (r == 0.0)
        throw DomainError("r = 0 is a coordinate singularity; use the symmetric limit");
}

} // namespace

Warp warp(const ManifoldModel& model, double r)
{
    require_admissible(model, r);
    const double k = std::sqrt(model.kappa());
    switch (model.kind()) {
    case ManifoldKind::flat:
        return {r, 1.0, 0.0, 0.0};
    case ManifoldKind::hyperbolic: {
        const double sh = std::sinh(k * r);
        const double ch = std::cosh(k * r);
        return {sh / k, ch, k * sh, k * k * ch};
    }
    case ManifoldKind::spherical: {
        const double sn = std::sin(k * r);
        const double cs = std::cos(k * r);
        return {sn / k, cs, -k * sn, -k * k * cs};
    }
    }
    return {};
}

WarpLogDerivative warp_log_derivative(const ManifoldModel& model, double r)
{
    require_positive_radius(model, r);
    const double k = std::sqrt(model.kappa());
    switch (model.kind()) {
    case ManifoldKind::flat:
        return {1.0 / r, -1.0 / (r * r), 2.0 / (r * r * r)};
    case ManifoldKind::hyperbolic: {
        const double x = k * r;
        const double sh = std::sinh(x);
        const double cth = 1.0 / std::tanh(x);
        const double csch2 = 1.0 / (sh * sh);
        return {k * cth, -k * k * csch2, 2.0 * k * k * k * cth * csch2};
    }
    case ManifoldKind::spherical: {
        const double x = k * r;
        const double sn = std::sin(x);
        const double ct = std::cos(x) / sn;
        const double csc2 = 1.0 / (sn * sn);
        return {k * ct, -k * k * csc2, 2.0 * k * k * k * ct * csc2};
    }
    }
    return {};
}

double radial_laplacian(const ManifoldModel& model, double f_r, double f_rr, double r,
                        bool symmetric_limit)
{
    if (r == 0.0) {
        if (!symmetric_limit)
            throw DomainError("radial Laplacian at r = 0 requires the symmetric limit");
        return model.dimension() * f_rr;
    }
    const double h = warp_log_derivative(model, r).h;
    return f_rr + (model.dimension() - 1) * h * f_r;
}

double geodesic_distance(const ManifoldModel& model, double r1, double r2)
{
    for (double r : {r1, r2}) {
        if (!(r >= 0.0) || r > model.max_radius())
            throw DomainError("radius " + std::to_string(r) + " outside admissible range of the "
                              + to_string(model.kind()) + " model");
    }
    return std::abs(r1 - r2);
}

HessianRicci radial_hessian_and_ricci(const ManifoldModel& model, double v_r, double v_rr, double r)
{
    const double h = warp_log_derivative(model, r).h;
    const int n = model.dimension();
    // s''/s is constant on every model space: 0, kappa, -kappa.
    double curvature_ratio = 0.0;
    if (model.kind() == ManifoldKind::hyperbolic)
        curvature_ratio = model.kappa();
    else if (model.kind() == ManifoldKind::spherical)
        curvature_ratio = -model.kappa();
    const double tangential = h * v_r;
    return {v_rr * v_rr + (n - 1) * tangential * tangential, -(n - 1) * curvature_ratio * v_r * v_r};
}

} // namespace pme
