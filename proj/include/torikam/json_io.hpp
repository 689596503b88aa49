#ifndef TORIKAM_JSON_IO_HPP
#define TORIKAM_JSON_IO_HPP

// Needs nlohmann/json (vendor/json.hpp) on the include path.

#include "examples_search.hpp"
#include "kam.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace torikam {

using Json = nlohmann::ordered_json;

inline constexpr const char* kMatrixSchema = "torikam.matrix/1";
inline constexpr const char* kActionSchema = "torikam.action/1";
inline constexpr const char* kFourierSchema = "torikam.fourier/1";
inline constexpr const char* kRecipeSchema = "torikam.recipe/1";
inline constexpr const char* kKamConfigSchema = "torikam.kam-config/1";

struct JsonError : std::runtime_error {
    std::string source;
    std::size_t line = 0, column = 0;

    JsonError(std::string src, std::size_t l, std::size_t c, const std::string& what)
        : std::runtime_error(src + ":" + std::to_string(l) + ":" + std::to_string(c) + ": " + what),
          source(std::move(src)), line(l), column(c)
    {
    }
};

// Input that parses but does not describe a valid object.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Json parse_json_text(const std::string& text, const std::string& source = "<input>")
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        auto p = msg.find("column ");
        if (p != std::string::npos && (p = msg.find(": ", p)) != std::string::npos)
            msg = msg.substr(p + 2);
        throw JsonError(source, line, col, msg);
    }
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json load_json_file(const std::string& path) { return parse_json_text(read_file(path), path); }

// ---- integers, rationals, matrices

inline BigInt bigint_from_json(const Json& j)
{
    if (j.is_number_integer())
        return BigInt(j.get<long long>());
    if (j.is_string())
        return BigInt(j.get<std::string>());
    throw SchemaError("expected an integer, got " + j.dump());
}

inline Json bigint_to_json(const BigInt& x)
{
    if (fits_i64(x))
        return Json(x.convert_to<long long>());
    return Json(x.str());
}

inline Rational rational_from_json(const Json& j)
{
    if (j.is_number_integer())
        return Rational(j.get<long long>());
    if (j.is_number_float())
        return Rational(j.get<double>());
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        auto slash = s.find('/');
        if (slash == std::string::npos)
            return Rational(BigInt(s));
        BigInt den(s.substr(slash + 1));
        if (den == 0)
            throw SchemaError("zero denominator in " + s);
        return Rational(BigInt(s.substr(0, slash)), den);
    }
    throw SchemaError("expected a number, got " + j.dump());
}

inline Json rational_to_json(const Rational& x)
{
    if (denominator(x) == 1)
        return bigint_to_json(numerator(x));
    return Json(numerator(x).str() + "/" + denominator(x).str());
}

inline SquareIntMatrix square_from_json(const Json& j)
{
    const Json& rows = j.is_object() ? j.at("matrix") : j;
    if (!rows.is_array() || rows.empty())
        throw SchemaError("matrix must be a non-empty array of rows");
    const std::size_t n = rows.size();
    SquareIntMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n)
            throw SchemaError("matrix row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
        for (std::size_t k = 0; k < n; ++k)
            m(i, k) = bigint_from_json(rows[i][k]);
    }
    return m;
}

inline IntMatrix matrix_from_json(const Json& j)
{
    try {
        return IntMatrix(square_from_json(j));
    } catch (const std::domain_error& e) {
        throw SchemaError(e.what());
    }
}

inline Json matrix_to_json(const IntMatrix& m)
{
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.dim(); ++k)
            row.push_back(bigint_to_json(m(i, k)));
        rows.push_back(row);
    }
    return rows;
}

// {"generators": {"A": [[..]], ...}} or {"generators": [{"name": .., "matrix": ..}, ...]}
inline ActionSpec action_from_json(const Json& j)
{
    std::vector<std::pair<std::string, IntMatrix>> gens;
    if (j.is_array()) {
        gens.emplace_back("A", matrix_from_json(j));
    } else if (j.contains("matrix")) {
        gens.emplace_back(j.value("name", std::string("A")), matrix_from_json(j.at("matrix")));
    } else if (j.contains("generators")) {
        const Json& g = j.at("generators");
        if (g.is_object()) {
            for (const auto& [name, m] : g.items())
                gens.emplace_back(name, matrix_from_json(m));
        } else if (g.is_array()) {
            for (const auto& e : g)
                gens.emplace_back(e.at("name").get<std::string>(), matrix_from_json(e.at("matrix")));
        } else {
            throw SchemaError("generators must be an object or an array");
        }
    } else {
        throw SchemaError("expected a matrix or an action with \"generators\"");
    }
    if (gens.empty())
        throw SchemaError("action has no generators");
    try {
        return ActionSpec(gens);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
}

inline Json action_to_json(const ActionSpec& spec)
{
    Json g = Json::object();
    for (const auto& [name, m] : spec.generators)
        g[name] = matrix_to_json(m);
    return Json{{"schema", kActionSchema}, {"generators", g}};
}

// ---- Fourier maps: modes [{"k": [..], "c": [[re, im], ..]}], one entry per +-pair

template <class T>
Json scalar_to_json(const T& x)
{
    if constexpr (std::is_same_v<T, Rational>)
        return rational_to_json(x);
    else
        return Json(x);
}

template <class T>
T scalar_from_json(const Json& j)
{
    if constexpr (std::is_same_v<T, Rational>) {
        return rational_from_json(j);
    } else {
        if (j.is_number())
            return j.get<double>();
        return to_double(rational_from_json(j));
    }
}

template <class T>
Json fourier_to_json(const FourierMap<T>& f)
{
    Json modes = Json::array();
    for (const auto& [v, c] : f.coeffs()) {
        if (-v < v)
            continue;
        Json cs = Json::array();
        for (const auto& x : c)
            cs.push_back(Json::array({scalar_to_json(x.re), scalar_to_json(x.im)}));
        modes.push_back(Json{{"k", v}, {"c", cs}});
    }
    return Json{{"schema", kFourierSchema},
                {"scalar", std::is_same_v<T, Rational> ? "rational" : "double"},
                {"dim_in", f.dim_in()},
                {"dim_out", f.dim_out()},
                {"modes", modes}};
}

template <class T>
FourierMap<T> fourier_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("modes"))
        throw SchemaError("Fourier map needs \"modes\"");
    const std::size_t n = j.at("dim_in").get<std::size_t>();
    const std::size_t m = j.value("dim_out", n);
    FourierMap<T> f(n, m);
    for (const auto& e : j.at("modes")) {
        const Freq v = e.at("k").get<Freq>();
        if (v.size() != n)
            throw SchemaError("mode " + e.at("k").dump() + " has the wrong length");
        const Json& cs = e.at("c");
        if (!cs.is_array() || cs.size() != m)
            throw SchemaError("coefficient of mode " + e.at("k").dump() + " must have " + std::to_string(m) +
                              " entries");
        CVec<T> c(m);
        for (std::size_t i = 0; i < m; ++i) {
            const Json& x = cs[i];
            if (x.is_array())
                c[i] = Cx<T>(scalar_from_json<T>(x.at(0)), scalar_from_json<T>(x.at(1)));
            else
                c[i] = Cx<T>(scalar_from_json<T>(x));
        }
        const CVec<T> prev = f.get(v);
        bool fresh = true;
        for (const auto& x : prev)
            fresh = fresh && x.is_zero();
        if (!fresh && prev != c)
            throw SchemaError("mode " + e.at("k").dump() + " is not the conjugate of its mirror");
        try {
            f.set(v, c);
        } catch (const std::invalid_argument& ex) {
            throw SchemaError(std::string("mode ") + e.at("k").dump() + ": " + ex.what());
        }
    }
    return f;
}

// ---- recipes, one JSON object per line

inline Json certificate_to_json(const Certificate& c)
{
    return Json{{"predicate", c.predicate}, {"pass", c.pass}, {"witness", c.witness}};
}

inline Json recipe_to_json(const ExampleRecipe& r)
{
    Json certs = Json::array();
    for (const auto& c : r.certificates)
        certs.push_back(certificate_to_json(c));
    Json params = Json::object();
    for (const auto& [k, v] : r.parameters)
        params[k] = v;
    return Json{{"schema", kRecipeSchema},
                {"family", r.family},
                {"parameters", params},
                {"action", action_to_json(r.spec)},
                {"certificates", certs}};
}

struct LoadedRecipe {
    ExampleRecipe recipe;            // certificates recomputed
    std::vector<Certificate> stored; // as found in the file
    bool agrees = false;             // recomputed == stored, all passing
};

inline LoadedRecipe recipe_from_json(const Json& j)
{
    LoadedRecipe out;
    out.recipe.family = j.at("family").get<std::string>();
    if (j.contains("parameters"))
        for (const auto& [k, v] : j.at("parameters").items())
            out.recipe.parameters[k] = v.get<std::string>();
    out.recipe.spec = action_from_json(j.at("action"));
    if (j.contains("certificates"))
        for (const auto& c : j.at("certificates"))
            out.stored.push_back({c.at("predicate").get<std::string>(), c.at("pass").get<bool>(),
                                  c.value("witness", std::string())});
    out.recipe.certificates = recertify(out.recipe);
    out.agrees = out.recipe.all_pass() && out.stored.size() == out.recipe.certificates.size();
    for (std::size_t i = 0; out.agrees && i < out.stored.size(); ++i)
        out.agrees = out.stored[i].predicate == out.recipe.certificates[i].predicate &&
                     out.stored[i].pass == out.recipe.certificates[i].pass;
    return out;
}

inline std::string recipes_to_jsonl(const std::vector<ExampleRecipe>& rs)
{
    std::string s;
    for (const auto& r : rs)
        s += recipe_to_json(r).dump() + "\n";
    return s;
}

inline std::vector<LoadedRecipe> recipes_from_jsonl(const std::string& text, const std::string& source = "<db>")
{
    std::vector<LoadedRecipe> out;
    std::istringstream in(text);
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            out.push_back(recipe_from_json(parse_json_text(line, source)));
        } catch (const JsonError& e) {
            throw JsonError(source, no, e.column, std::string(e.what()).substr(e.source.size() + 1));
        } catch (const std::exception& e) {
            throw JsonError(source, no, 1, e.what());
        }
    }
    return out;
}

// ---- KAM run configuration

struct KamRunConfig {
    ActionSpec base;
    std::string kind = "conjugated"; // conjugated | explicit
    double epsilon = 1e-3;
    std::uint64_t seed = 1;
    std::map<std::string, FourierMapD> perturbations; // explicit only
    KamConfig kam;
};

inline KamRunConfig kam_config_from_json(const Json& j)
{
    KamRunConfig c;
    c.base = action_from_json(j.at("action"));
    c.kam.trunc_radius = j.value("trunc_radius", c.kam.trunc_radius);
    c.kam.grid_size = j.value("grid_size", c.kam.grid_size);
    c.kam.gate = j.value("gate", c.kam.gate);
    c.kam.target = j.value("target", c.kam.target);
    c.kam.max_iters = j.value("max_iters", c.kam.max_iters);
    if (j.contains("l"))
        c.kam.l_override = j.at("l").get<int>();
    const Json& p = j.at("perturbation");
    c.kind = p.value("kind", std::string("conjugated"));
    if (c.kind == "conjugated") {
        c.epsilon = p.value("epsilon", c.epsilon);
        c.seed = p.value("seed", c.seed);
    } else if (c.kind == "explicit") {
        for (const auto& [name, m] : p.at("maps").items())
            c.perturbations[name] = fourier_from_json<double>(m);
    } else {
        throw SchemaError("unknown perturbation kind " + c.kind);
    }
    return c;
}

inline Json kam_config_to_json(const KamRunConfig& c)
{
    Json p{{"kind", c.kind}};
    if (c.kind == "conjugated") {
        p["epsilon"] = c.epsilon;
        p["seed"] = c.seed;
    } else {
        Json maps = Json::object();
        for (const auto& [n, m] : c.perturbations)
            maps[n] = fourier_to_json(m);
        p["maps"] = maps;
    }
    return Json{{"schema", kKamConfigSchema},
                {"action", action_to_json(c.base)},
                {"perturbation", p},
                {"trunc_radius", c.kam.trunc_radius},
                {"grid_size", c.kam.grid_size},
                {"gate", c.kam.gate},
                {"target", c.kam.target},
                {"max_iters", c.kam.max_iters}};
}

// The perturbed action a config describes; conjugated inputs come from Omega0 = low_mode_map(eps, seed).
inline PerturbedAction build_perturbed_action(const KamRunConfig& c)
{
    if (c.kind == "explicit") {
        PerturbedAction pa;
        pa.base = c.base;
        pa.perturbations = c.perturbations;
        pa.trunc_radius = c.kam.trunc_radius;
        pa.grid_size = c.kam.grid_size;
        for (const auto& [name, m] : c.base.generators)
            if (!pa.perturbations.count(name))
                pa.perturbations[name] = FourierMapD(c.base.dim, c.base.dim);
        pa.validate();
        return pa;
    }
    std::mt19937_64 rng(c.seed);
    auto omega0 = low_mode_map(c.base.dim, c.epsilon, rng);
    return conjugated_action(c.base, omega0, c.kam.trunc_radius, c.kam.grid_size).pa;
}

} // namespace torikam

#endif
