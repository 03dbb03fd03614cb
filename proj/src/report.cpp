#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "pme/errors.hpp"
#include "pme/harness.hpp"

namespace pme {

namespace {

json number_to_json(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return x;
}

double number_from_json(const json& j)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
    }
    throw ConfigError("report field is not a number: " + j.dump());
}

// Replaces non-finite numbers anywhere in a details tree.
json sanitize(const json& j)
{
    if (j.is_number_float())
        return number_to_json(j.get<double>());
    if (j.is_array() || j.is_object()) {
        json out = j;
        for (auto it = out.begin(); it != out.end(); ++it)
            *it = sanitize(*it);
        return out;
    }
    return j;
}

std::string csv_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + "\"";
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << content;
    if (!out)
        throw ConfigError("failed writing '" + path + "'");
}

} // namespace

const char* to_string(CheckStatus status)
{
    switch (status) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::report_only: return "REPORT-ONLY";
    }
    return "unknown";
}

CheckStatus check_status_from_string(const std::string& name)
{
    if (name == "PASS") return CheckStatus::pass;
    if (name == "FAIL") return CheckStatus::fail;
    if (name == "REPORT-ONLY") return CheckStatus::report_only;
    throw ConfigError("unknown check status '" + name + "'");
}

json report_to_json(const VerificationReport& rep)
{
    json doc;
    doc["scenario"] = rep.scenario;
    doc["solver_invoked"] = rep.solver_invoked;
    if (rep.solver) {
        const SolverDiagnostics& d = *rep.solver;
        doc["solver"] = {{"steps", d.steps},
                         {"newton_iterations", d.newton_iterations},
                         {"max_newton_iterations", d.max_newton_iterations},
                         {"initial_mass", number_to_json(d.initial_mass)},
                         {"final_mass", number_to_json(d.final_mass)},
                         {"max_relative_mass_drift", number_to_json(d.max_relative_mass_drift)}};
    } else {
        doc["solver"] = nullptr;
    }
    json checks = json::array();
    for (const CheckRecord& c : rep.checks) {
        checks.push_back({{"id", c.id},
                          {"kind", c.kind},
                          {"status", to_string(c.status)},
                          {"worst_slack", number_to_json(c.worst_slack)},
                          {"r", number_to_json(c.r)},
                          {"t", number_to_json(c.t)},
                          {"tolerance", number_to_json(c.tolerance)},
                          {"details", sanitize(c.details)}});
    }
    doc["checks"] = std::move(checks);
    doc["all_pass"] = rep.all_pass();
    return doc;
}

VerificationReport report_from_json(const json& doc)
{
    try {
        VerificationReport rep;
        rep.scenario = doc.at("scenario");
        rep.solver_invoked = doc.at("solver_invoked").get<bool>();
        if (!doc.at("solver").is_null()) {
            const json& s = doc.at("solver");
            SolverDiagnostics d;
            d.steps = s.at("steps").get<long>();
            d.newton_iterations = s.at("newton_iterations").get<long>();
            d.max_newton_iterations = s.at("max_newton_iterations").get<int>();
            d.initial_mass = number_from_json(s.at("initial_mass"));
            d.final_mass = number_from_json(s.at("final_mass"));
            d.max_relative_mass_drift = number_from_json(s.at("max_relative_mass_drift"));
            rep.solver = d;
        }
        for (const json& c : doc.at("checks")) {
            CheckRecord rec;
            rec.id = c.at("id").get<std::string>();
            rec.kind = c.at("kind").get<std::string>();
            rec.status = check_status_from_string(c.at("status").get<std::string>());
            rec.worst_slack = number_from_json(c.at("worst_slack"));
            rec.r = number_from_json(c.at("r"));
            rec.t = number_from_json(c.at("t"));
            rec.tolerance = number_from_json(c.at("tolerance"));
            rec.details = c.at("details");
            rep.checks.push_back(std::move(rec));
        }
        return rep;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

void write_report_csv(const VerificationReport& rep, std::ostream& out)
{
    out << "check_id,status,worst_slack,r,t,tolerance\n";
    for (const CheckRecord& c : rep.checks) {
        out << csv_field(c.id) << ',' << to_string(c.status) << ',' << csv_number(c.worst_slack) << ','
            << csv_number(c.r) << ',' << csv_number(c.t) << ',' << csv_number(c.tolerance) << '\n';
    }
}

void emit_report(const VerificationReport& rep, ReportFormat format, const std::string& path)
{
    if (format == ReportFormat::json) {
        write_file(path, report_to_json(rep).dump(2) + "\n");
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ConfigError("cannot write '" + path + "'");
        write_report_csv(rep, out);
        if (!out)
            throw ConfigError("failed writing '" + path + "'");
    }

    const std::filesystem::path p(path);
    const std::filesystem::path stem = p.parent_path() / p.stem();
    for (std::size_t k = 0; k < rep.checks.size(); ++k) {
        const CheckRecord& c = rep.checks[k];
        if (c.plot.empty())
            continue;
        std::string body = "r,t,lhs,rhs,slack\n";
        for (const auto& row : c.plot) {
            body += csv_number(row[0]);
            for (std::size_t j = 1; j < row.size(); ++j)
                body += "," + csv_number(row[j]);
            body += "\n";
        }
        write_file(stem.string() + ".plot." + std::to_string(k) + ".csv", body);
    }
}

} // namespace pme
