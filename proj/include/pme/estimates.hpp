#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pme/lemma.hpp"
#include "pme/pressure.hpp"

namespace pme {

// The five (alpha(t), phi(t)) families of noncompact Li-Yau estimates
//   |grad v|^2/v - alpha(t) v_t/v - phi(t) <= 0.
enum class ProfileKind {
    constant_alpha_davies, // alpha const, phi = alpha^2/(2(alpha-1)) a c + a alpha^2/t
    lnvv_baseline,         // alpha const, phi = alpha^2/(alpha-1) a c + a alpha^2/t
    hamilton,              // alpha = e^{2ct}, phi = a alpha^2/t
    lixu_hyperbolic,       // phi = a c (coth(ct) + 1), alpha = 1 + coth(ct) - ct/sinh^2(ct)
    lixu_linear,           // phi = a/t + a c + a c^2 t/3, alpha = 1 + 2ct/3
};
// where c = (m-1) M K throughout.

const char* to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);
bool uses_constant_alpha(ProfileKind kind);

class EstimateProfile {
public:
    EstimateProfile(ProfileKind kind, PMEParameters params, double M, double K,
                    std::optional<double> alpha_const = std::nullopt);

    ProfileKind kind() const { return kind_; }
    const PMEParameters& params() const { return params_; }
    double M() const { return M_; }
    double K() const { return K_; }
    std::optional<double> alpha_const() const { return alpha_const_; }
    // (m-1) M K
    double rate() const { return rate_; }

    double alpha(double t) const;
    double phi(double t) const;
    double dalpha(double t) const;
    double dphi(double t) const;

    TimeCoefficients coefficients() const;

private:
    ProfileKind kind_;
    PMEParameters params_;
    double M_;
    double K_;
    std::optional<double> alpha_const_;
    double rate_;
};

EstimateProfile make_profile(ProfileKind kind, const PMEParameters& params, double M, double K,
                             std::optional<double> alpha_const = std::nullopt);

// x coth x - 1 and its first two derivatives, accurate for small x.
double xcoth_minus_one(double x);
double xcoth_d1(double x);
double xcoth_d2(double x);

// Which nodes of a pressure field enter a bound check.
struct NodeSelection {
    // the estimates are stated for solutions starting at time 0; this is the
    // field time that corresponds to it
    double time_origin = 0.0;
    bool skip_first_level = true;
    bool skip_outer_boundary = true;
    // only nodes with r <= ball_radius
    double ball_radius = std::numeric_limits<double>::infinity();
    // optional per-node mask (row-major, nonzero = keep)
    std::vector<char> mask;
};

struct DeficitField {
    std::vector<double> lhs;   // |grad v|^2/v - alpha v_t/v (NaN where excluded)
    std::vector<double> rhs;   // bound value at the node
    std::vector<double> slack; // rhs - lhs
    double min_slack = std::numeric_limits<double>::infinity();
    double r_at_min = 0.0;
    double t_at_min = 0.0;
    double max_rhs = 0.0;
    std::size_t checked = 0;
    std::size_t excluded_nonpositive_time = 0;
};

// Slack phi(t) + alpha(t) v_t/v - |grad v|^2/v of a noncompact estimate;
// the estimate holds at a node iff the slack is >= -tolerance.
DeficitField li_yau_deficit(const PressureField& pf, const EstimateProfile& profile,
                            const NodeSelection& selection = {});

enum class LocalTheorem { thm11, thm12, thm13, thm14 };

const char* to_string(LocalTheorem theorem);
LocalTheorem local_theorem_from_string(const std::string& name);

// Right-hand side of a local estimate on B_p(R) with measured cutoff
// constants in place of the unspecified C. thm11/thm12 bound
// |grad v|^2/v - alpha v_t/v; thm13/thm14 bound that quantity minus phi(t).
// Returns +inf where the estimate degenerates (thm12-14 at K = 0).
double local_bound(LocalTheorem theorem, const PMEParameters& params, double M, double K, double R,
                   double c_grad, double c_lap, double t,
                   std::optional<double> alpha_const = std::nullopt);

// Profile whose alpha(t) (and phi(t) for thm13/thm14) the local estimate uses.
EstimateProfile local_profile(LocalTheorem theorem, const PMEParameters& params, double M, double K,
                              std::optional<double> alpha_const = std::nullopt);

struct LocalBoundSpec {
    LocalTheorem theorem;
    double R;
    double c_grad;
    double c_lap;
    std::optional<double> alpha_const;
};

// Local slack over B_p(R); M is taken over B_p(2R) and all time levels.
DeficitField local_deficit(const PressureField& pf, const LocalBoundSpec& spec, double K,
                           NodeSelection selection);

struct OdeResidual {
    double r1;
    double r2;
    double scale1; // sum of magnitudes of the terms in each equation
    double scale2;

    double relative1() const { return scale1 > 0.0 ? r1 / scale1 : r1; }
    double relative2() const { return scale2 > 0.0 ? r2 / scale2 : r2; }
};

// Residuals of the ODE systems the Li-Xu profiles satisfy; ParameterError
// for other kinds.
OdeResidual ode_residual(const EstimateProfile& profile, double t);

struct HeatLimit {
    double alpha;
    double phi;
};

// m -> 1 limit of a noncompact estimate for the heat equation.
// lnvv_baseline maps to Li-Yau, constant_alpha_davies to Davies,
// hamilton to Hamilton, the Li-Xu kinds to the Li-Xu profiles.
HeatLimit heat_equation_limit(ProfileKind kind, int n, double K, double t,
                              std::optional<double> alpha_const = std::nullopt);

struct LimitPoint {
    double eps;
    double alpha;
    double phi_times_M;
    double alpha_error;
    double phi_error;
};

// Evaluates each profile at m = 1 + eps, M = 1/eps (so (m-1)M = 1) and
// compares phi*M and alpha with the heat-equation limit.
std::vector<LimitPoint> limit_convergence(ProfileKind kind, int n, double K, double t,
                                          std::optional<double> alpha_const,
                                          const std::vector<double>& eps);

std::vector<double> dyadic_eps(int k_first, int k_last);

} // namespace pme
