#include <torikam/cohomology.hpp>
#include <torikam/examples_search.hpp>
#include <torikam/json_io.hpp>
#include <torikam/kam.hpp>
#include <torikam/verify.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <thread>

using namespace torikam;

namespace {

// Exit codes. Stable; see README.
enum Exit : int {
    kOk = 0,
    kNegative = 1, // obstruction found, check failed, run not converged, nothing found
    kUsage = 2,
    kInput = 3,    // unreadable file, malformed JSON, schema or precondition violation
    kInternal = 4,
};

struct Common {
    std::string input;
    std::string output;
    double tol = -1;
    double radius = -1;
    int grid = -1;
    int iters = -1;
    long long seed = -1;
    int threads = 1;
};

int precision_digits()
{
    if (const char* p = std::getenv("TORIKAM_PRECISION")) {
        int d = std::atoi(p);
        if (d >= 16 && d <= 200)
            return d;
        std::cerr << "warning: ignoring TORIKAM_PRECISION=" << p << " (expected 16..200)\n";
    }
    return 30;
}

int capped_threads(int requested)
{
    int hw = int(std::max(1u, std::thread::hardware_concurrency()));
    return std::clamp(requested, 1, hw);
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

// ---- analyze

Json analyze_action(const ActionSpec& spec, int digits, int word_radius)
{
    Json gens = Json::array();
    for (const auto& [name, m] : spec.generators) {
        auto u = is_unipotent(m);
        Json g{{"name", name},
               {"char_poly", poly_str(char_poly(m))},
               {"ergodic", is_ergodic(m)},
               {"hyperbolic", is_hyperbolic(m)},
               {"unipotent", u.unipotent}};
        if (u.unipotent)
            g["unipotent_index"] = u.index;
        try {
            auto s = split(m, digits);
            g["split"] = Json{{"dims", {s.dim(1), s.dim(2), s.dim(3)}}, {"rho", s.rho}, {"precision", digits}};
        } catch (const precision_exhausted& e) {
            g["split"] = Json{{"error", e.what()}};
        }
        gens.push_back(g);
    }
    Json rep{{"schema", "torikam.analyze/1"}, {"dim", spec.dim}, {"generators", gens}};
    auto series = lower_central_series(spec);
    rep["nilpotency"] = Json{{"nilpotent", series.nilpotent}, {"length", series.length}, {"verdict", series.verdict}};
    if (spec.generators.size() >= 2) {
        auto hr = is_higher_rank(spec.generators[0].second, spec.generators[1].second);
        rep["higher_rank"] = Json{{"pair", {spec.generators[0].first, spec.generators[1].first}},
                                  {"pass", hr.pass},
                                  {"reason", hr.reason}};
    }
    auto gph = is_genuinely_partially_hyperbolic(spec, word_radius);
    rep["genuinely_partially_hyperbolic"] = Json{{"pass", gph.pass},
                                                 {"has_ergodic", gph.has_ergodic},
                                                 {"no_hyperbolic", gph.no_hyperbolic},
                                                 {"common_neutral", gph.common_neutral},
                                                 {"neutral_dim", gph.neutral_dim},
                                                 {"reason", gph.reason}};
    return rep;
}

int cmd_analyze(const Common& c)
{
    const int word_radius = c.radius > 0 ? int(c.radius) : 2;
    auto spec = action_from_json(load_json_file(c.input));
    emit(analyze_action(spec, precision_digits(), word_radius).dump(2) + "\n", c.output);
    return kOk;
}

// ---- solve

template <class T>
Json obstruction_json(const ObstructionReport<T>& r, std::size_t max_rows = 50)
{
    Json orbits = Json::array();
    std::size_t shown = 0;
    for (const auto& o : r.orbits) {
        double nrm = 0;
        for (const auto& x : o.value)
            nrm = std::max(nrm, std::hypot(to_double(x.re), to_double(x.im)));
        if (nrm == 0)
            continue;
        if (shown++ >= max_rows)
            break;
        orbits.push_back(Json{{"rep", o.rep}, {"terms", o.terms}, {"k_range", {o.k_min, o.k_max}}, {"norm", nrm}});
    }
    return Json{{"schema", "torikam.obstruction/1"},
                {"max_norm", r.max_norm},
                {"orbits", r.orbits.size()},
                {"support", r.support},
                {"nonzero", orbits}};
}

template <class T>
int solve_impl(const Common& c, const Json& theta_j, const IntMatrix& p, const IntMatrix& q, double tol,
               const std::string& obstruction_path)
{
    auto theta = fourier_from_json<T>(theta_j);
    auto r = solve_twisted(theta, p, q, tol);
    Json ob = obstruction_json(r.report);
    ob["solved"] = r.ok;
    ob["reason"] = r.reason;
    ob["mean_solved"] = r.mean_solved;
    ob["tol"] = tol;
    if (!obstruction_path.empty())
        emit(ob.dump(2) + "\n", obstruction_path);
    if (!r.ok) {
        if (obstruction_path.empty())
            std::cerr << ob.dump(2) << "\n";
        std::cerr << "obstructed: " << r.reason << "\n";
        return kNegative;
    }
    Json out = fourier_to_json(r.omega);
    out["residual"] = r.residual;
    emit(out.dump(2) + "\n", c.output);
    return kOk;
}

int cmd_solve(const Common& c, const std::string& p_path, const std::string& q_path, const std::string& ob_path,
              bool rational)
{
    Json theta_j = load_json_file(c.input);
    IntMatrix p = action_from_json(load_json_file(p_path)).generators.at(0).second;
    IntMatrix q = action_from_json(load_json_file(q_path)).generators.at(0).second;
    const bool exact = rational || theta_j.value("scalar", std::string("double")) == "rational";
    const double tol = c.tol >= 0 ? c.tol : (exact ? 0.0 : 1e-10);
    if (exact)
        return solve_impl<Rational>(c, theta_j, p, q, tol, ob_path);
    return solve_impl<double>(c, theta_j, p, q, tol, ob_path);
}

// ---- kam

// L is measured per pair "x,y"; a generator's column is the max over pairs containing it.
double pair_l_norm(const KamReport& r, const std::string& name)
{
    double m = 0;
    for (const auto& [pair, v] : r.l_norms) {
        auto comma = pair.find(',');
        if (pair.substr(0, comma) == name || pair.substr(comma + 1) == name)
            m = std::max(m, v);
    }
    return m;
}

int cmd_kam(const Common& c, const std::string& conj_path, const std::string& save_config, bool timing)
{
    auto cfg = kam_config_from_json(load_json_file(c.input));
    if (c.radius > 0)
        cfg.kam.trunc_radius = c.radius;
    if (c.grid > 0)
        cfg.kam.grid_size = std::size_t(c.grid);
    if (c.iters > 0)
        cfg.kam.max_iters = c.iters;
    if (c.seed >= 0)
        cfg.seed = std::uint64_t(c.seed);
    if (c.tol > 0)
        cfg.kam.target = c.tol;
    if (!save_config.empty())
        emit(kam_config_to_json(cfg).dump(2) + "\n", save_config);

    std::ofstream file;
    std::ostream* csv = &std::cout;
    if (!c.output.empty() && c.output != "-") {
        file.open(c.output, std::ios::binary);
        if (!file)
            throw std::runtime_error("cannot write " + c.output);
        csv = &file;
    }
    const std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    *csv << "# torikam kam csv v1\n";
    *csv << "# generated " << stamp << "\n";
    *csv << "iter,generator,err_c0,err_c1,L_norm,discarded" << (timing ? ",seconds" : "") << "\n";
    csv->flush();

    const PerturbedAction pa = build_perturbed_action(cfg);
    auto run = kam_run(pa, cfg.kam, [&](const KamReport& r) {
        for (const auto& [name, e] : r.errors) {
            *csv << r.iteration << "," << name << "," << fmt(e.c0) << "," << fmt(e.c1) << ","
                 << fmt(pair_l_norm(r, name)) << "," << fmt(e.discarded);
            if (timing)
                *csv << "," << fmt(r.seconds);
            *csv << "\n";
        }
        csv->flush();
    });
    std::cerr << "status: " << run.status << (run.diagnostics.empty() ? "" : " (" + run.diagnostics + ")") << "\n";
    if (!conj_path.empty()) {
        Json out = fourier_to_json(run.conjugacy);
        out["status"] = run.status;
        out["diagnostics"] = run.diagnostics;
        out["discarded"] = run.conjugacy_discarded;
        Json errs = Json::array();
        for (double e : run.errors())
            errs.push_back(e);
        out["errors"] = errs;
        emit(out.dump(2) + "\n", conj_path);
    }
    return run.status == "converged" ? kOk : kNegative;
}

// ---- search

int cmd_search(const Common& c, const std::string& mode, int degree, int bound, int blocks,
               const std::string& strategy)
{
    if (mode == "reciprocal") {
        auto hits = search_reciprocal_nonhyperbolic(degree, bound);
        std::vector<ExampleRecipe> rs;
        for (const auto& h : hits)
            rs.push_back(recipe_from_hit(h, bound));
        emit(recipes_to_jsonl(rs), c.output);
        std::cerr << hits.size() << " certified polynomials (degree " << degree << ", |a_i| <= " << bound << ")\n";
        return kOk;
    }
    if (mode == "theorem2") {
        if (c.input.empty())
            throw CLI::ValidationError("--input", "theorem2 needs a base matrix");
        auto base = action_from_json(load_json_file(c.input)).generators.at(0).second;
        emit(recipes_to_jsonl({theorem2_family(blocks, base)}), c.output);
        return kOk;
    }
    if (mode == "assemble") {
        IntMatrix seed;
        if (!c.input.empty()) {
            seed = action_from_json(load_json_file(c.input)).generators.at(0).second;
        } else {
            auto hits = search_reciprocal_nonhyperbolic(degree, bound);
            if (hits.empty()) {
                std::cerr << "no seed: reciprocal search is empty\n";
                return kNegative;
            }
            seed = hits.front().companion_matrix;
        }
        auto rep = assemble_higher_rank_ph(seed, strategy);
        std::cerr << rep.reason << "\n";
        if (!rep.recipe)
            return kNegative;
        emit(recipes_to_jsonl({*rep.recipe}), c.output);
        return kOk;
    }
    throw CLI::ValidationError("--mode", "unknown search mode " + mode);
}

// ---- verify

// Rows marked info are printed but do not decide the exit code.
int print_rows(const std::vector<VerifyRow>& rows, const std::string& path, std::size_t info_rows = 0)
{
    std::string s;
    bool ok = rows.size() > info_rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        s += std::string(r.pass ? "PASS" : "FAIL") + "  " + r.label + "  " + r.detail + "\n";
        if (i >= info_rows)
            ok = ok && r.pass;
    }
    emit(s, path);
    return ok ? kOk : kNegative;
}

int cmd_verify(const Common& c, const std::string& suite, int k_bound, long long n_fixed, long long n_max)
{
    if (c.input.empty())
        throw CLI::ValidationError("--input", "suite " + suite + " needs --input");
    std::vector<VerifyRow> rows;
    if (suite == "recipes") {
        auto db = recipes_from_jsonl(read_file(c.input), c.input);
        if (db.empty())
            throw CLI::ValidationError("--input", "empty database");
        for (std::size_t i = 0; i < db.size(); ++i) {
            const auto& r = db[i];
            std::string failing;
            for (const auto& cert : r.recipe.certificates)
                if (!cert.pass)
                    failing += " [" + cert.predicate + "]";
            rows.push_back({"line " + std::to_string(i + 1) + " " + r.recipe.family, r.agrees,
                            r.agrees ? std::to_string(r.recipe.certificates.size()) + " certificates recomputed"
                                     : "recomputed certificates disagree" + failing});
        }
        return print_rows(rows, c.output);
    }
    auto spec = action_from_json(load_json_file(c.input));
    if (suite == "growth") {
        if (spec.generators.size() < 2)
            throw CLI::ValidationError("--input", "growth needs two generators");
        const int vr = c.radius > 0 ? int(c.radius) : 20;
        auto r = verify_pair_growth(spec.generators[0].second, spec.generators[1].second, k_bound, vr);
        rows.push_back({"tau > 0", r.tau > 0, "tau = " + fmt(r.tau) + (r.note.empty() ? "" : " " + r.note)});
        rows.push_back({"fitted C > 0", r.c_fit > 0 && std::isfinite(r.c_fit),
                        "C_train = " + fmt(r.c_train) + ", C = " + fmt(r.c_fit)});
        rows.push_back({"bound on |k|_inf <= " + std::to_string(k_bound) + ", |v| <= " + std::to_string(vr),
                        r.ok && r.violations == 0,
                        std::to_string(r.samples) + " samples, " + std::to_string(r.violations) +
                            " below C, min ratio " + fmt(r.c_full)});
    } else if (suite == "unipotent") {
        if (spec.generators.size() < 2)
            throw CLI::ValidationError("--input", "unipotent needs F and Q");
        const int vr = c.radius > 0 ? int(c.radius) : 10;
        auto r = verify_unipotent_growth(spec.generators[0].second, spec.generators[1].second, k_bound, 50, vr);
        rows.push_back({"fitted C > 0", r.c_fit > 0 && std::isfinite(r.c_fit),
                        "rho = " + fmt(r.tau) + ", C_train = " + fmt(r.c_train) + ", C = " + fmt(r.c_fit)});
        rows.push_back({"bound on |k1| <= " + std::to_string(k_bound) + ", |k2| <= 50, |v| <= " + std::to_string(vr),
                        r.ok, std::to_string(r.samples) + " samples, " + std::to_string(r.violations) +
                                  " below C, min ratio " + fmt(r.c_full)});
    } else if (suite == "displacement") {
        if (spec.generators.size() < 2)
            throw CLI::ValidationError("--input", "displacement needs A and at least one partner");
        std::vector<IntMatrix> xs;
        for (std::size_t i = 1; i < spec.generators.size(); ++i) {
            xs.push_back(spec.generators[i].second.dual());
            xs.push_back(spec.generators[i].second.inverse().dual());
        }
        const int br = c.radius > 0 ? int(c.radius) : 30;
        const IntMatrix ad = spec.generators[0].second.dual();
        auto d = n_fixed > 0 ? verify_displacement_at(ad, xs, br, n_fixed, {1, 2})
                             : verify_displacement_suite(ad, xs, br, n_max, {1, 2});
        rows = d.rows;
        if (n_fixed <= 0) {
            for (auto& r : rows)
                if (!r.pass)
                    r.label += " (below threshold)";
            rows.push_back({"threshold n <= " + std::to_string(n_max), d.n.has_value(),
                            d.n ? "n = " + std::to_string(*d.n) : "not found"});
            return print_rows(rows, c.output, rows.size() - 1);
        }
    } else {
        throw CLI::ValidationError("--suite", "unknown suite " + suite);
    }
    return print_rows(rows, c.output);
}

void add_common(CLI::App* sub, Common& c, bool input_required)
{
    auto* in = sub->add_option("--input,-i", c.input, "input file");
    if (input_required)
        in->required();
    sub->add_option("--output,-o", c.output, "output file (default stdout)");
    sub->add_option("--tol", c.tol, "tolerance");
    sub->add_option("--radius", c.radius, "radius (truncation, sample or word ball)");
    sub->add_option("--grid", c.grid, "grid points per axis");
    sub->add_option("--iters", c.iters, "iteration cap");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--threads", c.threads, "worker cap")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"torikam: integer-matrix actions on tori, twisted cohomology and KAM iteration"};
    app.require_subcommand(1);
    Common c;

    auto* analyze = app.add_subcommand("analyze", "ergodicity, hyperbolicity, splitting and nilpotency of an action");
    add_common(analyze, c, true);

    std::string p_path, q_path, ob_path;
    bool rational = false;
    auto* solve = app.add_subcommand("solve", "solve P w - w o Q = theta or report the obstruction");
    add_common(solve, c, true);
    solve->add_option("--p", p_path, "matrix P")->required();
    solve->add_option("--q", q_path, "matrix Q (ergodic)")->required();
    solve->add_option("--obstruction", ob_path, "write the obstruction report here");
    solve->add_flag("--rational", rational, "exact arithmetic");

    std::string conj_path, save_config;
    bool timing = false;
    auto* kam = app.add_subcommand("kam", "run the KAM iteration from a config; CSV on stdout or --output");
    add_common(kam, c, true);
    kam->add_option("--conjugacy", conj_path, "write the final conjugacy here");
    kam->add_option("--save-config", save_config, "write the effective config here");
    kam->add_flag("--timing", timing, "add a seconds column (not reproducible)");

    std::string mode = "reciprocal", strategy = "centralizer";
    int degree = 6, bound = 3, blocks = 2;
    auto* search = app.add_subcommand("search", "certified example searches; JSON lines");
    add_common(search, c, false);
    search->add_option("--mode", mode, "reciprocal | theorem2 | assemble")
        ->check(CLI::IsMember({"reciprocal", "theorem2", "assemble"}));
    search->add_option("--degree", degree, "polynomial degree");
    search->add_option("--bound", bound, "coefficient bound");
    search->add_option("--blocks", blocks, "number of blocks (theorem2)");
    search->add_option("--strategy", strategy, "centralizer | block-nilpotent")
        ->check(CLI::IsMember({"centralizer", "block-nilpotent"}));

    std::string suite;
    int k_bound = 6;
    long long n_fixed = 0, n_max = 50;
    auto* verify = app.add_subcommand("verify", "growth, displacement and recipe verifiers; PASS/FAIL table");
    add_common(verify, c, false);
    verify->add_option("--suite", suite, "growth | unipotent | displacement | recipes")->required();
    verify->add_option("--k", k_bound, "bound on |k|");
    verify->add_option("--n", n_fixed, "displacement: check this n only");
    verify->add_option("--n-max", n_max, "displacement: threshold search limit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    const int threads = capped_threads(c.threads);
    if (threads != c.threads)
        std::cerr << "note: --threads capped at " << threads << "\n";

    try {
        if (analyze->parsed())
            return cmd_analyze(c);
        if (solve->parsed())
            return cmd_solve(c, p_path, q_path, ob_path, rational);
        if (kam->parsed())
            return cmd_kam(c, conj_path, save_config, timing);
        if (search->parsed())
            return cmd_search(c, mode, degree, bound, blocks, strategy);
        if (verify->parsed())
            return cmd_verify(c, suite, k_bound, n_fixed, n_max);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const JsonError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kInput;
    } catch (const SchemaError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInput;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
