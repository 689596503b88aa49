#ifndef TORIKAM_ACTION_HPP
#define TORIKAM_ACTION_HPP

#include "spectral.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace torikam {

struct ActionSpec {
    std::size_t dim = 0;
    std::vector<std::pair<std::string, IntMatrix>> generators;
    std::optional<int> nilpotency_length;
    std::vector<std::string> ergodic_witnesses;
    std::vector<IntMatrix> d_chain;

    ActionSpec() = default;
    ActionSpec(std::vector<std::pair<std::string, IntMatrix>> gens) : generators(std::move(gens))
    {
        if (generators.empty())
            throw std::invalid_argument("action needs at least one generator");
        dim = generators[0].second.dim();
        for (const auto& [name, m] : generators)
            if (m.dim() != dim)
                throw std::invalid_argument("generator " + name + " has the wrong dimension");
    }

    bool has(const std::string& name) const
    {
        for (const auto& g : generators)
            if (g.first == name)
                return true;
        return false;
    }

    const IntMatrix& get(const std::string& name) const
    {
        for (const auto& g : generators)
            if (g.first == name)
                return g.second;
        throw std::out_of_range("unknown generator: " + name);
    }

    std::vector<IntMatrix> matrices() const
    {
        std::vector<IntMatrix> r;
        for (const auto& g : generators)
            r.push_back(g.second);
        return r;
    }
};

struct Word {
    std::vector<std::pair<std::string, int>> letters; // exponent +1 or -1

    IntMatrix eval(const ActionSpec& spec) const
    {
        IntMatrix r = IntMatrix::identity(spec.dim);
        for (const auto& [name, e] : letters)
            r = r * (e > 0 ? spec.get(name) : spec.get(name).inverse());
        return r;
    }

    std::string str() const
    {
        if (letters.empty())
            return "e";
        std::string s;
        for (const auto& [name, e] : letters)
            s += name + (e > 0 ? "" : "^-1");
        return s;
    }
};

// x^{-1} y^{-1} x y
inline IntMatrix commutator(const IntMatrix& x, const IntMatrix& y) { return x.inverse() * y.inverse() * x * y; }

inline std::vector<IntMatrix> commutator_chain(const IntMatrix& x, const IntMatrix& y, int depth)
{
    if (x.dim() != y.dim())
        throw std::invalid_argument("dimension mismatch in commutator chain");
    std::vector<IntMatrix> d;
    if (depth <= 0)
        return d;
    d.push_back(commutator(x, y));
    const IntMatrix xi = x.inverse();
    for (int i = 1; i < depth; ++i)
        d.push_back(xi * d.back().inverse() * x * d.back());
    return d;
}

// Reduced words of length <= radius with their values, deduplicated by value, in
// length-then-lexicographic order.
inline std::vector<std::pair<Word, IntMatrix>> word_ball(const ActionSpec& spec, int radius)
{
    std::vector<std::pair<std::string, int>> alphabet;
    for (const auto& g : spec.generators) {
        alphabet.emplace_back(g.first, 1);
        alphabet.emplace_back(g.first, -1);
    }
    std::map<std::string, IntMatrix> inv;
    for (const auto& g : spec.generators)
        inv.emplace(g.first, g.second.inverse());
    std::vector<std::pair<Word, IntMatrix>> out{{Word{}, IntMatrix::identity(spec.dim)}};
    std::set<std::vector<BigInt>> seen{out[0].second.square().data()};
    std::vector<std::pair<Word, IntMatrix>> frontier = out;
    for (int len = 1; len <= radius; ++len) {
        std::vector<std::pair<Word, IntMatrix>> next;
        for (const auto& [w, m] : frontier)
            for (const auto& letter : alphabet) {
                if (!w.letters.empty() && w.letters.back().first == letter.first &&
                    w.letters.back().second == -letter.second)
                    continue;
                Word w2 = w;
                w2.letters.push_back(letter);
                IntMatrix m2 = m * (letter.second > 0 ? spec.get(letter.first) : inv.at(letter.first));
                next.emplace_back(std::move(w2), std::move(m2));
            }
        for (const auto& e : next) {
            if (seen.insert(e.second.square().data()).second)
                out.push_back(e);
        }
        frontier = std::move(next);
    }
    return out;
}

struct SeriesReport {
    std::vector<std::vector<IntMatrix>> levels; // levels[0] = generators
    bool nilpotent = false;
    int length = 0;                             // last nonempty level when nilpotent
    int max_depth = 0;
    int word_bound = 0;
    std::string verdict;
};

inline SeriesReport lower_central_series(const ActionSpec& spec, int max_depth = 6, int word_bound = 2,
                                         std::size_t cap = 48)
{
    SeriesReport r;
    r.max_depth = max_depth;
    r.word_bound = word_bound;
    auto ball = word_ball(spec, word_bound);
    std::vector<IntMatrix> level;
    for (const auto& g : spec.generators)
        level.push_back(g.second);
    r.levels.push_back(level);
    for (int depth = 1; depth <= max_depth; ++depth) {
        std::vector<IntMatrix> next;
        for (const auto& [w, m] : ball) {
            if (m.is_identity())
                continue;
            for (const auto& h : level) {
                IntMatrix c = commutator(m, h);
                if (c.is_identity())
                    continue;
                if (std::find(next.begin(), next.end(), c) == next.end())
                    next.push_back(c);
                if (next.size() >= cap)
                    break;
            }
            if (next.size() >= cap)
                break;
        }
        if (next.empty()) {
            r.nilpotent = true;
            r.length = depth;
            r.verdict = "nilpotent of length " + std::to_string(depth) + " (words <= " +
                        std::to_string(word_bound) + ", depth <= " + std::to_string(max_depth) + ")";
            return r;
        }
        r.levels.push_back(next);
        level = std::move(next);
    }
    r.verdict = "not nilpotent within bounds (words <= " + std::to_string(word_bound) + ", depth <= " +
                std::to_string(max_depth) + ")";
    return r;
}

struct HigherRankVerdict {
    bool pass = false;
    int k_bound = 0;
    std::optional<std::array<int, 2>> failing_k;
    GrowthRate growth;
    std::string reason;
};

// Nonzero k in the half plane k1 > 0 or (k1 = 0, k2 > 0), ordered by |k|_inf then k1 then k2.
inline std::vector<std::array<int, 2>> half_plane(int k_bound)
{
    std::vector<std::array<int, 2>> ks;
    for (int r = 1; r <= k_bound; ++r)
        for (int k1 = 0; k1 <= r; ++k1)
            for (int k2 = -r; k2 <= r; ++k2) {
                if (std::max(std::abs(k1), std::abs(k2)) != r)
                    continue;
                if (k1 == 0 && k2 <= 0)
                    continue;
                ks.push_back({k1, k2});
            }
    return ks;
}

inline HigherRankVerdict is_higher_rank(const IntMatrix& a, const IntMatrix& b, int k_bound = 4)
{
    HigherRankVerdict v;
    v.k_bound = k_bound;
    for (const auto& k : half_plane(k_bound)) {
        if (!is_ergodic(a.pow(k[0]) * b.pow(k[1]))) {
            v.failing_k = k;
            v.reason = "a^" + std::to_string(k[0]) + " b^" + std::to_string(k[1]) + " is not ergodic";
            return v;
        }
    }
    v.growth = pair_growth_rate(a, b);
    if (!v.growth.ok) {
        v.reason = v.growth.certificate;
        return v;
    }
    v.pass = true;
    v.reason = "ergodic for 0 < |k| <= " + std::to_string(k_bound) + ", tau = " + std::to_string(v.growth.tau);
    return v;
}

struct GphVerdict {
    bool pass = false;
    bool has_ergodic = false;
    std::string ergodic_witness;
    bool no_hyperbolic = false;
    std::string hyperbolic_witness;
    bool common_neutral = false;
    std::size_t neutral_dim = 0;
    std::string reason;
};

// Orthonormal basis of the intersection of the neutral subspaces of the generators.
inline Eigen::MatrixXd common_neutral_subspace(const ActionSpec& spec)
{
    const Eigen::Index n = Eigen::Index(spec.dim);
    Eigen::MatrixXd stacked(0, n);
    for (const auto& g : spec.generators) {
        auto s = split(g.second, 30, 0);
        const Eigen::MatrixXd& V = s.basis[1];
        Eigen::MatrixXd comp = Eigen::MatrixXd::Identity(n, n) - V * V.transpose();
        Eigen::MatrixXd next(stacked.rows() + n, n);
        next << stacked, comp;
        stacked = next;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index d = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) < 1e-9)
            ++d;
    d += n - std::min<Eigen::Index>(n, sv.size());
    return svd.matrixV().rightCols(d);
}

inline GphVerdict is_genuinely_partially_hyperbolic(const ActionSpec& spec, int word_radius = 2)
{
    GphVerdict v;
    auto ball = word_ball(spec, word_radius);
    v.no_hyperbolic = true;
    for (const auto& [w, m] : ball) {
        if (w.letters.empty())
            continue;
        if (!v.has_ergodic && is_ergodic(m)) {
            v.has_ergodic = true;
            v.ergodic_witness = w.str();
        }
        if (v.no_hyperbolic && is_hyperbolic(m)) {
            v.no_hyperbolic = false;
            v.hyperbolic_witness = w.str();
        }
    }
    Eigen::MatrixXd W = common_neutral_subspace(spec);
    v.neutral_dim = std::size_t(W.cols());
    bool invariant = W.cols() > 0;
    for (const auto& g : spec.generators) {
        if (!invariant)
            break;
        Eigen::MatrixXd G = detail::to_double(g.second.square());
        Eigen::MatrixXd GW = G * W;
        if ((GW - W * (W.transpose() * GW)).norm() > 1e-8 * (1 + GW.norm()))
            invariant = false;
    }
    v.common_neutral = invariant;
    v.pass = v.has_ergodic && v.no_hyperbolic && v.common_neutral;
    if (!v.has_ergodic)
        v.reason = "no ergodic word within radius " + std::to_string(word_radius);
    else if (!v.no_hyperbolic)
        v.reason = "hyperbolic word " + v.hyperbolic_witness;
    else if (!v.common_neutral)
        v.reason = "no common invariant neutral subspace";
    else
        v.reason = "ergodic witness " + v.ergodic_witness + ", common neutral dimension " +
                   std::to_string(v.neutral_dim);
    return v;
}

inline bool conjugate_ergodicity_check(const IntMatrix& x, const IntMatrix& y)
{
    if (x.dim() != y.dim())
        throw std::invalid_argument("dimension mismatch");
    if (unit_circle_count(char_poly(x)) != int(x.dim()))
        throw std::invalid_argument("x has eigenvalues off the unit circle; not a commutator-subgroup element");
    if (!is_ergodic(y))
        throw std::invalid_argument("y is not ergodic");
    return is_ergodic(x * y);
}

} // namespace torikam

#endif
