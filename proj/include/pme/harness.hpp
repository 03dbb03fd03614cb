#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pme/estimates.hpp"
#include "pme/geometry.hpp"
#include "pme/harnack.hpp"
#include "pme/solver.hpp"

namespace pme {

using json = nlohmann::json;

struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::flat;
    int n = 1;
    double kappa = 0.0;
};

struct InitialData {
    enum class Type { constant, gaussian_bump, barenblatt_shifted };
    Type type = Type::constant;
    double c = 1.0;
    // gaussian_bump: base + amplitude exp(-r^2/width^2)
    double base = 1.0;
    double amplitude = 1.0;
    double width = 1.0;
    // barenblatt_shifted: Barenblatt(C) at start_time plus a positive floor
    double C = 1.0;
    double floor = 1e-3;
    double start_time = 1.0;
};

struct NoncompactCheck {
    ProfileKind profile;
    std::vector<double> alphas; // constant-alpha profiles only
};

struct LocalCheck {
    LocalTheorem theorem;
    double R;
    std::optional<double> alpha;
    std::optional<double> c_grad;
    std::optional<double> c_lap;
};

struct HarnackPair {
    SpaceTimePoint p1;
    SpaceTimePoint p2;
};

struct HarnackCheck {
    Corollary corollary;
    bool from_field = true;
    std::optional<double> alpha;
    std::vector<HarnackPair> pairs;
    // formula source only; rho defaults to |r1 - r2|
    double M = 1.0;
    double Mt = 1.0;
    double K = 0.0;
};

struct OdeCheck {
    ProfileKind kind;
    double M = 1.0;
    double K = 1.0;
    double t_min = 1e-3;
    double t_max = 1e3;
    int t_count = 100;
};

struct LimitCheck {
    ProfileKind kind;
    double K = 1.0;
    double t = 1.0;
    std::optional<double> alpha;
    int k_first = 2;
    int k_last = 20;
};

struct IdentityCheck {
    std::optional<double> tolerance;
};

using CheckSpec = std::variant<NoncompactCheck, LocalCheck, HarnackCheck, OdeCheck, LimitCheck, IdentityCheck>;

struct NamedCheck {
    std::string id;
    CheckSpec spec;
};

struct Tolerances {
    // absent: 5 (h^2 + tau) max(phi) over the checked nodes
    std::optional<double> bound_slack;
    double quadrature = 1e-9;
    double ode = 1e-10;
};

struct Scenario {
    ManifoldSpec manifold;
    double m = 2.0;
    GridSpec grid{4.0, 64, 1.0, 2.0, 32, 1};
    // absent: t0, or 0 for barenblatt_shifted data
    std::optional<double> time_origin;
    InitialData initial_data;
    std::vector<NamedCheck> checks;
    Tolerances tolerances;
    json document; // the parsed input, echoed in reports

    ManifoldModel model() const;
    PMEParameters params() const;
    double effective_time_origin() const;
    bool needs_solution() const;
};

// Throws ConfigError naming the offending key path.
Scenario parse_scenario(const json& doc);
Scenario load_scenario(const std::string& path);

enum class CheckStatus { pass, fail, report_only };
const char* to_string(CheckStatus status);
CheckStatus check_status_from_string(const std::string& name);

struct CheckRecord {
    std::string id;
    std::string kind;
    CheckStatus status = CheckStatus::pass;
    double worst_slack = 0.0;
    double r = 0.0;
    double t = 0.0;
    double tolerance = 0.0;
    json details = json::object();
    // rows (r, t, lhs, rhs, slack) for bound checks; written as a separate CSV
    std::vector<std::array<double, 5>> plot;
};

struct VerificationReport {
    json scenario = json::object();
    bool solver_invoked = false;
    std::optional<SolverDiagnostics> solver;
    std::vector<CheckRecord> checks;

    bool all_pass() const;
};

VerificationReport run_scenario(const Scenario& s);

// Plot data is not part of the JSON document; non-finite numbers are
// stored as the strings "inf", "-inf" and "nan".
json report_to_json(const VerificationReport& rep);
VerificationReport report_from_json(const json& doc);

enum class ReportFormat { json, csv };

void write_report_csv(const VerificationReport& rep, std::ostream& out);
// Writes the report and, next to it, <stem>.plot.<k>.csv for every check
// that carries plot data.
void emit_report(const VerificationReport& rep, ReportFormat format, const std::string& path);

int cli_main(int argc, char** argv);

} // namespace pme
