#pragma once

#include <span>
#include <string>
#include <vector>

namespace pme {

enum class ManifoldKind { flat, hyperbolic, spherical };

const char* to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

// Rotationally symmetric model space with metric dr^2 + s(r)^2 dOmega^2.
// Hyperbolic models have sectional curvature -kappa, so Ric >= -(n-1) kappa;
// flat and spherical models have Ric >= 0.
class ManifoldModel {
public:
    static ManifoldModel flat(int n);
    static ManifoldModel hyperbolic(int n, double kappa);
    static ManifoldModel spherical(int n, double kappa);
    static ManifoldModel make(ManifoldKind kind, int n, double kappa);

    ManifoldKind kind() const { return kind_; }
    int dimension() const { return n_; }
    double kappa() const { return kappa_; }

    // Magnitude of the Ricci lower bound, Ric >= -K.
    double ricci_bound() const;

    // Supremum of admissible radii: pi/sqrt(kappa) for spherical models,
    // +inf otherwise.
    double max_radius() const;

    bool admissible(double r) const;

private:
    ManifoldModel(ManifoldKind kind, int n, double kappa) : kind_(kind), n_(n), kappa_(kappa) {}

    ManifoldKind kind_;
    int n_;
    double kappa_;
};

struct Warp {
    double s;
    double ds;
    double d2s;
    double d3s;
};

// Warp function and its first three derivatives. Throws DomainError for
// r < 0 or r beyond the model's admissible range.
Warp warp(const ManifoldModel& model, double r);

// H = s'/s together with H' and H''. Requires r > 0.
struct WarpLogDerivative {
    double h;
    double dh;
    double d2h;
};
WarpLogDerivative warp_log_derivative(const ManifoldModel& model, double r);

// Laplacian of a radial function from its radial derivatives. At r = 0
// the caller must pass symmetric_limit = true, which evaluates n * f_rr.
double radial_laplacian(const ManifoldModel& model, double f_r, double f_rr, double r,
                        bool symmetric_limit = false);

// Distance between two points on a common radial ray.
double geodesic_distance(const ManifoldModel& model, double r1, double r2);

struct HessianRicci {
    double hessian_sq; // |Hess v|^2
    double ricci;      // Ric(grad v, grad v)
};

HessianRicci radial_hessian_and_ricci(const ManifoldModel& model, double v_r, double v_rr, double r);

// Cubic Hermite step used for the localisation cutoff: 1 on [0,1],
// 0 on [2,inf), (1-y)^2 (1+2y) with y = x-1 in between.
struct CutoffProfile {
    double value;
    double d1;
    double d2;
};
CutoffProfile cutoff_profile(double x);

struct CutoffFunction {
    double R = 0.0;
    std::vector<double> r;
    std::vector<double> phi;
    std::vector<double> grad; // radial derivative
    std::vector<double> lap;  // Laplacian
    // sup |grad phi|^2 R^2 / phi over nodes with phi > 0
    double c_grad = 0.0;
    // sup (-lap phi) R^2 / (1 + sqrt(K) R coth(sqrt(K) R))
    double c_lap = 0.0;
};

// 1 + sqrt(K) R coth(sqrt(K) R), with the K -> 0 limit 2.
double cutoff_curvature_factor(double K, double R);

// Samples the cutoff phi(r) = psi(r/R) on the given grid and measures the
// constants. The grid must cover [0, 2R] with at least 16 nodes in [R, 2R].
CutoffFunction build_cutoff(const ManifoldModel& model, double R, std::span<const double> grid);

} // namespace pme
