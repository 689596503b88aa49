#ifndef TORIKAM_EXAMPLES_SEARCH_HPP
#define TORIKAM_EXAMPLES_SEARCH_HPP

#include "action.hpp"
#include "arithmetic.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace torikam {

struct Certificate {
    std::string predicate;
    bool pass = false;
    std::string witness;
};

struct ExampleRecipe {
    std::string family; // theorem2 | theorem3-search | cat-products | unit-pair
    std::map<std::string, std::string> parameters;
    ActionSpec spec;
    std::vector<Certificate> certificates;

    bool all_pass() const
    {
        for (const auto& c : certificates)
            if (!c.pass)
                return false;
        return !certificates.empty();
    }
};

inline std::string poly_str(const IntPolynomial& p)
{
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i)
        s += (i ? "," : "") + p.coeff(i).str();
    return s + "]";
}

namespace detail {

inline std::vector<Certificate> theorem2_certificates(const ActionSpec& spec)
{
    std::vector<Certificate> out;
    const auto& [n1, a1] = spec.generators.at(0);
    out.push_back({n1 + " ergodic", is_ergodic(a1), "char poly " + poly_str(char_poly(a1))});
    std::vector<SquareIntMatrix> nils;
    for (std::size_t i = 1; i < spec.generators.size(); ++i) {
        const auto& [name, g] = spec.generators[i];
        SquareIntMatrix nil = g.square() - SquareIntMatrix::identity(spec.dim);
        out.push_back({"(" + name + " - I)^2 = 0", (nil * nil).is_zero(), ""});
        out.push_back({n1 + " " + name + " = " + name + " " + n1, a1 * g == g * a1, ""});
        nils.push_back(nil);
    }
    const std::size_t k = common_kernel_dim(nils);
    out.push_back({"common fixed space of the unipotents is {0}", !nils.empty() && k == 0,
                   "dimension " + std::to_string(k)});
    return out;
}

} // namespace detail

// A1 = diag(base, ..., base) and A_ij = I + E_ij (block (i, j) = I) for i != j.
inline ExampleRecipe theorem2_family(int n_blocks, const IntMatrix& base)
{
    if (n_blocks < 2)
        throw std::invalid_argument("theorem2_family: a single unipotent always fixes a nonzero vector");
    if (!is_ergodic(base))
        throw std::invalid_argument("theorem2_family: base is not ergodic");
    const std::size_t b = base.dim(), n = b * std::size_t(n_blocks);
    std::vector<std::pair<std::string, IntMatrix>> gens;
    gens.emplace_back("A1", block_diag(std::vector<IntMatrix>(std::size_t(n_blocks), base)));
    int idx = 2;
    for (int i = 0; i < n_blocks; ++i)
        for (int j = 0; j < n_blocks; ++j) {
            if (i == j)
                continue;
            SquareIntMatrix m = SquareIntMatrix::identity(n);
            for (std::size_t t = 0; t < b; ++t)
                m(std::size_t(i) * b + t, std::size_t(j) * b + t) = 1;
            gens.emplace_back("A" + std::to_string(idx++), IntMatrix(m));
        }
    ExampleRecipe r;
    r.family = "theorem2";
    r.parameters = {{"n_blocks", std::to_string(n_blocks)}, {"base", poly_str(char_poly(base))}};
    r.spec = ActionSpec(gens);
    r.certificates = detail::theorem2_certificates(r.spec);
    if (!r.all_pass())
        throw std::logic_error("theorem2_family: construction failed its own certificates");
    return r;
}

struct SearchHit {
    IntPolynomial poly;
    IntMatrix companion_matrix;
    int unimodular_roots = 0;
    std::vector<Certificate> certificates;
};

inline std::vector<Certificate> reciprocal_certificates(const IntPolynomial& p)
{
    std::vector<Certificate> c;
    const int deg = p.degree();
    const int on = unit_circle_count(p);
    c.push_back({"irreducible over Z", is_irreducible(p), poly_str(p)});
    c.push_back({"no root of unity", !has_root_of_unity(p), ""});
    c.push_back({"root off the unit circle", on < deg, std::to_string(deg - on) + " off"});
    c.push_back({"root on the unit circle", on > 0, std::to_string(on) + " on"});
    IntMatrix m(companion(p));
    c.push_back({"companion ergodic", is_ergodic(m), ""});
    c.push_back({"companion not hyperbolic", !is_hyperbolic(m), ""});
    return c;
}

// Monic reciprocal polynomials of the given degree with |a_i| <= bound, irreducible, ergodic, non-hyperbolic.
inline std::vector<SearchHit> search_reciprocal_nonhyperbolic(int degree, int coeff_bound)
{
    if (degree < 2 || degree % 2 != 0)
        throw std::invalid_argument("search_reciprocal_nonhyperbolic: degree must be even");
    const int h = degree / 2;
    std::vector<SearchHit> out;
    std::vector<int> a(std::size_t(h), -coeff_bound); // a_1 .. a_h
    while (true) {
        std::vector<BigInt> c(std::size_t(degree) + 1);
        c[0] = c[std::size_t(degree)] = 1;
        for (int i = 1; i <= h; ++i)
            c[std::size_t(i)] = c[std::size_t(degree - i)] = a[std::size_t(i - 1)];
        IntPolynomial p(c);
        const int on = unit_circle_count(p);
        if (on > 0 && on < degree && !has_root_of_unity(p) && is_irreducible(p)) {
            SearchHit hit{p, IntMatrix(companion(p)), on, reciprocal_certificates(p)};
            bool ok = true;
            for (const auto& cert : hit.certificates)
                ok = ok && cert.pass;
            if (!ok)
                throw std::logic_error("search hit failed re-certification: " + poly_str(p));
            out.push_back(std::move(hit));
        }
        std::size_t i = 0;
        while (i < a.size() && a[i] == coeff_bound)
            a[i++] = -coeff_bound;
        if (i == a.size())
            break;
        ++a[i];
    }
    return out;
}

struct AssemblyReport {
    std::optional<ExampleRecipe> recipe;
    std::size_t candidates = 0; // candidates that reached the predicates
    std::string reason;
};

inline std::vector<Certificate> higher_rank_ph_certificates(const ActionSpec& spec, int k_bound, int word_radius)
{
    std::vector<Certificate> c;
    auto hr = is_higher_rank(spec.generators[0].second, spec.generators[1].second, k_bound);
    c.push_back({"higher rank (" + spec.generators[0].first + ", " + spec.generators[1].first + ")", hr.pass,
                 hr.reason});
    auto gph = is_genuinely_partially_hyperbolic(spec, word_radius);
    c.push_back({"genuinely partially hyperbolic", gph.pass, gph.reason});
    return c;
}

// Second element for a seed: bounded polynomials in the seed (centralizer) or square-zero blocks.
inline AssemblyReport assemble_higher_rank_ph(const IntMatrix& seed, const std::string& strategy, int coeff_bound = 1,
                                              int k_bound = 4, int word_radius = 2)
{
    if (!is_ergodic(seed) || is_hyperbolic(seed))
        throw std::invalid_argument("assemble_higher_rank_ph: seed must be ergodic and non-hyperbolic");
    AssemblyReport rep;
    if (strategy == "centralizer") {
        const std::size_t n = seed.dim();
        std::vector<int> c(n, -coeff_bound);
        while (true) {
            SquareIntMatrix acc(n);
            SquareIntMatrix pw = SquareIntMatrix::identity(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (c[i] != 0)
                    acc = acc + pw.scaled(c[i]);
                pw = pw * seed.square();
            }
            BigInt d = acc.det();
            if (d == 1 || d == -1) {
                IntMatrix b(acc);
                ++rep.candidates;
                if (is_higher_rank(seed, b, k_bound).pass) {
                    ActionSpec spec({{"A", seed}, {"B", b}});
                    auto certs = higher_rank_ph_certificates(spec, k_bound, word_radius);
                    if (certs[1].pass) {
                        ExampleRecipe r;
                        r.family = "unit-pair";
                        std::string cs;
                        for (std::size_t i = 0; i < n; ++i)
                            cs += (i ? "," : "") + std::to_string(c[i]);
                        r.parameters = {{"strategy", strategy}, {"B", "[" + cs + "] in powers of A"}};
                        r.spec = spec;
                        r.certificates = certs;
                        rep.recipe = std::move(r);
                        rep.reason = "found";
                        return rep;
                    }
                }
            }
            std::size_t i = 0;
            while (i < n && c[i] == coeff_bound)
                c[i++] = -coeff_bound;
            if (i == n)
                break;
            ++c[i];
        }
        rep.reason = "none found within bounds (coefficients |c| <= " + std::to_string(coeff_bound) + ", " +
                     std::to_string(rep.candidates) + " unit candidates)";
        return rep;
    }
    if (strategy == "block-nilpotent") {
        auto t2 = theorem2_family(2, seed);
        ++rep.candidates;
        // second element: A1 times the first unipotent
        ActionSpec spec({{"A1", t2.spec.get("A1")}, {"A1A2", t2.spec.get("A1") * t2.spec.get("A2")}});
        auto certs = higher_rank_ph_certificates(spec, k_bound, word_radius);
        auto gph_full = is_genuinely_partially_hyperbolic(t2.spec, word_radius);
        certs.push_back({"genuinely partially hyperbolic (full block action)", gph_full.pass, gph_full.reason});
        bool ok = true;
        for (const auto& x : certs)
            ok = ok && x.pass;
        if (ok) {
            ExampleRecipe r = t2;
            r.parameters["strategy"] = strategy;
            for (auto& x : certs)
                r.certificates.push_back(x);
            rep.recipe = std::move(r);
            rep.reason = "found";
        } else {
            rep.reason = "none: ";
            for (const auto& x : certs)
                if (!x.pass)
                    rep.reason += x.predicate + " fails (" + x.witness + "); ";
        }
        return rep;
    }
    throw std::invalid_argument("assemble_higher_rank_ph: unknown strategy " + strategy);
}

// Recomputes a recipe's certificates from its spec.
inline std::vector<Certificate> recertify(const ExampleRecipe& r, int k_bound = 4, int word_radius = 2)
{
    if (r.family == "theorem2")
        return detail::theorem2_certificates(r.spec);
    if (r.family == "theorem3-search") {
        auto cp = char_poly(r.spec.generators.at(0).second);
        return reciprocal_certificates(cp);
    }
    if (r.family == "unit-pair")
        return higher_rank_ph_certificates(r.spec, k_bound, word_radius);
    throw std::invalid_argument("recertify: unknown family " + r.family);
}

inline ExampleRecipe recipe_from_hit(const SearchHit& h, int coeff_bound)
{
    ExampleRecipe r;
    r.family = "theorem3-search";
    r.parameters = {{"degree", std::to_string(h.poly.degree())},
                    {"coeff_bound", std::to_string(coeff_bound)},
                    {"poly", poly_str(h.poly)}};
    r.spec = ActionSpec({{"A", h.companion_matrix}});
    r.certificates = h.certificates;
    return r;
}

} // namespace torikam

#endif
