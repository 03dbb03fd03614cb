#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pme/errors.hpp"
#include "pme/harness.hpp"

namespace pme {

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported with their full path.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            fail(path_, "expected an object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& at(const std::string& key)
    {
        if (!obj_.contains(key))
            fail(key_path(key), "missing required key");
        used_.insert(key);
        return obj_.at(key);
    }

    double number(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_number())
            fail(key_path(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            fail(key_path(key), "expected a finite number");
        return x;
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::optional<double> optional_number(const std::string& key)
    {
        if (!has(key))
            return std::nullopt;
        return number(key);
    }

    int integer(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_number_integer())
            fail(key_path(key), "expected an integer");
        return v.get<int>();
    }

    int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

    std::string string(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_string())
            fail(key_path(key), "expected a string");
        return v.get<std::string>();
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        return has(key) ? string(key) : fallback;
    }

    std::vector<double> numbers(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_array())
            fail(key_path(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                fail(key_path(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void finish() const
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!used_.count(it.key()))
                fail(key_path(it.key()), "unknown key");
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& message)
    {
        throw ConfigError("scenario key '" + path + "': " + message);
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

template <class F>
auto translate(const std::string& path, F&& f)
{
    try {
        return f();
    } catch (const ConfigError& e) {
        ObjectReader::fail(path, e.what());
    } catch (const ParameterError& e) {
        ObjectReader::fail(path, e.what());
    }
}

ManifoldSpec parse_manifold(ObjectReader& root)
{
    ObjectReader r(root.at("manifold"), "manifold");
    ManifoldSpec spec;
    spec.kind = translate("manifold.kind", [&] { return manifold_kind_from_string(r.string("kind")); });
    spec.n = r.integer("n");
    if (spec.n < 1)
        ObjectReader::fail("manifold.n", "dimension must be >= 1");
    spec.kappa = r.number("kappa", spec.kind == ManifoldKind::flat ? 0.0 : 1.0);
    if (spec.kind != ManifoldKind::flat && !(spec.kappa > 0.0))
        ObjectReader::fail("manifold.kappa", "curvature scale must be > 0");
    r.finish();
    return spec;
}

InitialData parse_initial_data(ObjectReader& root)
{
    InitialData d;
    if (!root.has("initial_data"))
        return d;
    ObjectReader r(root.at("initial_data"), "initial_data");
    const std::string type = r.string("type");
    if (type == "constant") {
        d.type = InitialData::Type::constant;
        d.c = r.number("c", 1.0);
        if (!(d.c > 0.0))
            ObjectReader::fail("initial_data.c", "must be > 0");
    } else if (type == "gaussian_bump") {
        d.type = InitialData::Type::gaussian_bump;
        d.base = r.number("base", 1.0);
        d.amplitude = r.number("amplitude", 1.0);
        d.width = r.number("width", 1.0);
        if (!(d.base > 0.0))
            ObjectReader::fail("initial_data.base", "must be > 0");
        if (!(d.base + std::min(d.amplitude, 0.0) > 0.0))
            ObjectReader::fail("initial_data.amplitude", "data must stay positive");
        if (!(d.width > 0.0))
            ObjectReader::fail("initial_data.width", "must be > 0");
    } else if (type == "barenblatt_shifted") {
        d.type = InitialData::Type::barenblatt_shifted;
        d.C = r.number("C", 1.0);
        d.floor = r.number("floor", 1e-3);
        d.start_time = r.number("start_time", 1.0);
        if (!(d.C > 0.0))
            ObjectReader::fail("initial_data.C", "must be > 0");
        if (!(d.floor > 0.0))
            ObjectReader::fail("initial_data.floor", "must be > 0");
        if (!(d.start_time > 0.0))
            ObjectReader::fail("initial_data.start_time", "must be > 0");
    } else {
        ObjectReader::fail("initial_data.type", "unknown initial data '" + type + "'");
    }
    r.finish();
    return d;
}

NamedCheck parse_check(const json& j, std::size_t index)
{
    const std::string path = "checks[" + std::to_string(index) + "]";
    ObjectReader r(j, path);
    const std::string type = r.string("type");
    NamedCheck out;
    out.id = r.string("id", std::to_string(index) + ":" + type);
    auto kp = [&](const std::string& key) { return path + "." + key; };

    if (type == "noncompact_bound") {
        NoncompactCheck c;
        c.profile = translate(kp("profile"), [&] { return profile_kind_from_string(r.string("profile")); });
        if (r.has("alpha"))
            c.alphas = r.numbers("alpha");
        if (uses_constant_alpha(c.profile)) {
            if (c.alphas.empty())
                ObjectReader::fail(kp("alpha"), "constant-alpha profiles need a nonempty alpha list");
            for (double a : c.alphas)
                if (!(a > 1.0))
                    ObjectReader::fail(kp("alpha"), "every alpha must be > 1");
        } else if (!c.alphas.empty()) {
            ObjectReader::fail(kp("alpha"), "only constant-alpha profiles take an alpha list");
        }
        out.spec = c;
    } else if (type == "local_bound") {
        LocalCheck c;
        c.theorem = translate(kp("theorem"), [&] { return local_theorem_from_string(r.string("theorem")); });
        c.R = r.number("R");
        if (!(c.R > 0.0))
            ObjectReader::fail(kp("R"), "must be > 0");
        c.alpha = r.optional_number("alpha");
        c.c_grad = r.optional_number("C_grad");
        c.c_lap = r.optional_number("C_lap");
        if (c.c_grad.has_value() != c.c_lap.has_value())
            ObjectReader::fail(kp(c.c_grad ? "C_lap" : "C_grad"), "C_grad and C_lap must be given together");
        if (c.theorem == LocalTheorem::thm11 && !(c.alpha && *c.alpha > 1.0))
            ObjectReader::fail(kp("alpha"), "thm11 needs alpha > 1");
        out.spec = c;
    } else if (type == "harnack") {
        HarnackCheck c;
        c.corollary = translate(kp("corollary"), [&] { return corollary_from_string(r.string("corollary")); });
        const std::string source = r.string("source", "field");
        if (source != "field" && source != "formula")
            ObjectReader::fail(kp("source"), "expected 'field' or 'formula'");
        c.from_field = source == "field";
        c.alpha = r.optional_number("alpha");
        if (c.corollary == Corollary::cor12 && !(c.alpha && *c.alpha > 1.0))
            ObjectReader::fail(kp("alpha"), "cor12 needs alpha > 1");
        if (!c.from_field) {
            c.M = r.number("M");
            c.Mt = r.number("Mtilde", c.M);
            c.K = r.number("K", 0.0);
        }
        const json& pairs = r.at("pairs");
        if (!pairs.is_array() || pairs.empty())
            ObjectReader::fail(kp("pairs"), "expected a nonempty array");
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            ObjectReader pr(pairs[i], kp("pairs") + "[" + std::to_string(i) + "]");
            HarnackPair p{{pr.number("r1"), pr.number("t1")}, {pr.number("r2"), pr.number("t2")}};
            if (!(p.p1.t < p.p2.t))
                ObjectReader::fail(pr.key_path("t2"), "t2 must exceed t1");
            if (p.p1.r < 0.0 || p.p2.r < 0.0)
                ObjectReader::fail(pr.key_path("r1"), "radii must be >= 0");
            pr.finish();
            c.pairs.push_back(p);
        }
        out.spec = c;
    } else if (type == "ode_residual") {
        OdeCheck c;
        c.kind = translate(kp("kind"), [&] { return profile_kind_from_string(r.string("kind")); });
        if (c.kind != ProfileKind::lixu_hyperbolic && c.kind != ProfileKind::lixu_linear)
            ObjectReader::fail(kp("kind"), "ODE residuals exist for the Li-Xu profiles only");
        c.M = r.number("M", 1.0);
        c.K = r.number("K", 1.0);
        c.t_min = r.number("t_min", 1e-3);
        c.t_max = r.number("t_max", 1e3);
        c.t_count = r.integer("t_count", 100);
        if (!(c.M > 0.0) || !(c.K > 0.0))
            ObjectReader::fail(kp("K"), "M and K must be > 0");
        if (!(c.t_min > 0.0) || !(c.t_max >= c.t_min) || c.t_count < 1)
            ObjectReader::fail(kp("t_min"), "need 0 < t_min <= t_max and t_count >= 1");
        out.spec = c;
    } else if (type == "limit_study") {
        LimitCheck c;
        c.kind = translate(kp("kind"), [&] { return profile_kind_from_string(r.string("kind")); });
        c.K = r.number("K", 1.0);
        c.t = r.number("t", 1.0);
        c.alpha = r.optional_number("alpha");
        if (r.has("eps_exponents")) {
            const auto ks = r.numbers("eps_exponents");
            if (ks.size() != 2)
                ObjectReader::fail(kp("eps_exponents"), "expected [first, last]");
            c.k_first = static_cast<int>(ks[0]);
            c.k_last = static_cast<int>(ks[1]);
        }
        if (c.k_last < c.k_first + 2)
            ObjectReader::fail(kp("eps_exponents"), "need at least three eps values");
        if (!(c.K >= 0.0) || !(c.t > 0.0))
            ObjectReader::fail(kp("t"), "need K >= 0 and t > 0");
        if (uses_constant_alpha(c.kind) && !(c.alpha && *c.alpha > 1.0))
            ObjectReader::fail(kp("alpha"), "constant-alpha profiles need alpha > 1");
        out.spec = c;
    } else if (type == "identity_residual") {
        IdentityCheck c;
        c.tolerance = r.optional_number("tolerance");
        out.spec = c;
    } else {
        ObjectReader::fail(kp("type"), "unknown check type '" + type + "'");
    }
    r.finish();
    return out;
}

} // namespace

ManifoldModel Scenario::model() const
{
    return ManifoldModel::make(manifold.kind, manifold.n, manifold.kappa);
}

PMEParameters Scenario::params() const
{
    return PMEParameters(m, manifold.n);
}

double Scenario::effective_time_origin() const
{
    if (time_origin)
        return *time_origin;
    return initial_data.type == InitialData::Type::barenblatt_shifted ? 0.0 : grid.t0;
}

bool Scenario::needs_solution() const
{
    for (const auto& c : checks) {
        if (std::holds_alternative<NoncompactCheck>(c.spec) || std::holds_alternative<LocalCheck>(c.spec)
            || std::holds_alternative<IdentityCheck>(c.spec))
            return true;
        if (const auto* h = std::get_if<HarnackCheck>(&c.spec); h && h->from_field)
            return true;
    }
    return false;
}

Scenario parse_scenario(const json& doc)
{
    Scenario s;
    s.document = doc;
    ObjectReader root(doc, "");
    s.manifold = parse_manifold(root);

    {
        ObjectReader r(root.at("pme"), "pme");
        s.m = r.number("m");
        if (!(s.m > 1.0))
            ObjectReader::fail("pme.m", "the porous medium exponent must satisfy m > 1");
        r.finish();
    }

    if (root.has("grid")) {
        ObjectReader r(root.at("grid"), "grid");
        s.grid.r_max = r.number("r_max", s.grid.r_max);
        s.grid.nr = r.integer("nr", s.grid.nr);
        s.grid.t0 = r.number("t0", s.grid.t0);
        s.grid.T = r.number("T", s.grid.T);
        s.grid.nt = r.integer("nt", s.grid.nt);
        s.grid.substeps = r.integer("substeps", s.grid.substeps);
        s.time_origin = r.optional_number("time_origin");
        r.finish();
    }
    if (!(s.grid.r_max > 0.0))
        ObjectReader::fail("grid.r_max", "must be > 0");
    if (s.grid.nr < 16)
        ObjectReader::fail("grid.nr", "must be >= 16");
    if (s.grid.nt < 16)
        ObjectReader::fail("grid.nt", "must be >= 16");
    if (s.grid.substeps < 1)
        ObjectReader::fail("grid.substeps", "must be >= 1");
    if (!(s.grid.t0 > 0.0))
        ObjectReader::fail("grid.t0", "must be > 0");
    if (!(s.grid.T > s.grid.t0))
        ObjectReader::fail("grid.T", "must exceed grid.t0");
    if (s.time_origin && !(*s.time_origin <= s.grid.t0))
        ObjectReader::fail("grid.time_origin", "must not exceed grid.t0");

    s.initial_data = parse_initial_data(root);
    if (s.initial_data.type == InitialData::Type::barenblatt_shifted && s.grid.t0 != s.initial_data.start_time)
        ObjectReader::fail("initial_data.start_time", "must equal grid.t0");

    // model-level validation (spherical radius limit etc.)
    const ManifoldModel model = translate("manifold", [&] { return s.model(); });
    if (!(s.grid.r_max < model.max_radius()))
        ObjectReader::fail("grid.r_max", "exceeds the admissible radius of the model");

    if (root.has("checks")) {
        const json& checks = root.at("checks");
        if (!checks.is_array())
            ObjectReader::fail("checks", "expected an array");
        std::set<std::string> ids;
        for (std::size_t i = 0; i < checks.size(); ++i) {
            NamedCheck c = parse_check(checks[i], i);
            if (!ids.insert(c.id).second)
                ObjectReader::fail("checks[" + std::to_string(i) + "].id", "duplicate check id '" + c.id + "'");
            if (const auto* l = std::get_if<LocalCheck>(&c.spec); l && 2.0 * l->R > s.grid.r_max)
                ObjectReader::fail("checks[" + std::to_string(i) + "].R", "the ball of radius 2R must fit in the grid");
            s.checks.push_back(std::move(c));
        }
    }

    if (root.has("tolerances")) {
        ObjectReader r(root.at("tolerances"), "tolerances");
        s.tolerances.bound_slack = r.optional_number("bound_slack");
        s.tolerances.quadrature = r.number("quadrature", s.tolerances.quadrature);
        s.tolerances.ode = r.number("ode", s.tolerances.ode);
        if (s.tolerances.bound_slack && !(*s.tolerances.bound_slack >= 0.0))
            ObjectReader::fail("tolerances.bound_slack", "must be >= 0");
        if (!(s.tolerances.quadrature > 0.0))
            ObjectReader::fail("tolerances.quadrature", "must be > 0");
        if (!(s.tolerances.ode > 0.0))
            ObjectReader::fail("tolerances.ode", "must be > 0");
        r.finish();
    }
    root.finish();
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read scenario file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

} // namespace pme
