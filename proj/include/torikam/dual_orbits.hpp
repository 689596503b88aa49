#ifndef TORIKAM_DUAL_ORBITS_HPP
#define TORIKAM_DUAL_ORBITS_HPP

#include "action.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace torikam {

struct Classification {
    int index = 0;         // 1, 2 or 3
    bool absolute = false; // strict maximum

    std::string tag() const { return std::string(absolute ? "absolutely-in " : "mostly-in ") + std::to_string(index); }
};

inline Classification classify(const IntVec& v, const SpectralSplit& s)
{
    if (is_zero(v))
        throw std::invalid_argument("classify: zero vector");
    auto p = projection_norms(s, v);
    const double scale = std::max({p[0], p[1], p[2]});
    const bool near = std::abs(p[0] - p[1]) <= 1e-9 * scale || std::abs(p[0] - p[2]) <= 1e-9 * scale ||
                      std::abs(p[1] - p[2]) <= 1e-9 * scale;
    Classification c;
    if (near) {
        auto q = projection_norms_mp(s, v);
        const Real eps = pow(Real(10), -(s.precision - 5)) * std::max({q[0], q[1], q[2]});
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (q[i] > q[best] + eps)
                best = i;
        bool strict = true;
        for (int i = 0; i < 3; ++i)
            if (i != best && abs(q[i] - q[best]) <= eps)
                strict = false;
        c.index = best + 1;
        c.absolute = strict;
        return c;
    }
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (p[i] > p[best])
            best = i;
    c.index = best + 1;
    c.absolute = true;
    return c;
}

// Split of F^n from the split of F: same subspaces, classes swap for n < 0.
inline SpectralSplit power_split(const SpectralSplit& s, long long n)
{
    if (n == 0)
        throw std::invalid_argument("power_split: n = 0");
    SpectralSplit r = s;
    r.matrix = s.matrix.pow(n);
    for (auto& e : r.eigen) {
        e.value = pow(e.value, int(n));
        if (n < 0 && e.cls != 2)
            e.cls = 4 - e.cls;
    }
    if (n < 0) {
        std::swap(r.basis_mp[0], r.basis_mp[2]);
        std::swap(r.basis[0], r.basis[2]);
        std::swap(r.proj_mp[0], r.proj_mp[2]);
        std::swap(r.proj[0], r.proj[2]);
    }
    r.rho = std::pow(s.rho, double(std::llabs(n)));
    return r;
}

struct OrbitPoint {
    long long j = 0;
    IntVec point;
    std::array<double, 3> norms{};
};

struct DualOrbitRecord {
    IntVec base;
    IntMatrix map;
    std::vector<OrbitPoint> window;
    long long minimal_index = 0;
    IntVec minimal_point;
};

struct MinimalPoint {
    long long j = 0;
    IntVec point;
};

namespace detail {

// 1 if a > b, 0 on a tie at elevated precision, -1 if a < b; a = |pi_3|, b = max(|pi_1|, |pi_2|)
inline int compare_3_vs_12(const SpectralSplit& s, const OrbitPoint& p)
{
    const double a = p.norms[2], b = std::max(p.norms[0], p.norms[1]);
    const double scale = std::max(a, b);
    if (std::abs(a - b) > 1e-9 * scale)
        return a > b ? 1 : -1;
    auto q = projection_norms_mp(s, p.point);
    const Real qa = q[2], qb = q[0] > q[1] ? q[0] : q[1];
    const Real eps = pow(Real(10), -(s.precision - 5)) * (qa > qb ? qa : qb);
    if (abs(qa - qb) <= eps)
        return 0;
    return qa > qb ? 1 : -1;
}

inline bool mostly_in_3(const SpectralSplit& s, const OrbitPoint& p) { return compare_3_vs_12(s, p) >= 0; }
inline bool absolutely_in_12(const SpectralSplit& s, const OrbitPoint& p) { return compare_3_vs_12(s, p) < 0; }

inline OrbitPoint make_point(const SpectralSplit& s, long long j, IntVec v)
{
    OrbitPoint p;
    p.j = j;
    p.norms = projection_norms(s, v);
    p.point = std::move(v);
    return p;
}

} // namespace detail

// Orbit window of v under F = s.matrix: from where pi_3 dominates by `ratio` to where
// pi_{1,2} dominates by `ratio`, extended while sup norm <= escape_radius.
inline DualOrbitRecord orbit_record(const IntVec& v, const SpectralSplit& s, double escape_radius = 0,
                                    long long max_steps = 4096, double ratio = 1e6)
{
    if (is_zero(v))
        throw std::invalid_argument("orbit_record: zero vector");
    if (v.size() != s.dim())
        throw std::invalid_argument("orbit_record: dimension mismatch");
    const IntMatrix& F = s.matrix;
    const IntMatrix Fi = F.inverse();
    auto dom3 = [&](const OrbitPoint& p) { return p.norms[2] >= ratio * std::max(p.norms[0], p.norms[1]); };
    auto dom12 = [&](const OrbitPoint& p) { return std::max(p.norms[0], p.norms[1]) >= ratio * p.norms[2]; };
    auto big = [&](const OrbitPoint& p) { return escape_radius <= 0 || to_double(sup_norm(p.point)) > escape_radius; };

    std::vector<OrbitPoint> back;
    OrbitPoint cur = detail::make_point(s, 0, v);
    long long steps = 0;
    while (!(dom3(cur) && big(cur))) {
        if (++steps > max_steps)
            throw std::runtime_error("orbit_record: backward window exceeded " + std::to_string(max_steps) + " steps");
        back.push_back(cur);
        cur = detail::make_point(s, cur.j - 1, Fi.apply(cur.point));
    }
    DualOrbitRecord r;
    r.base = v;
    r.map = F;
    r.window.push_back(cur);
    for (auto it = back.rbegin(); it != back.rend(); ++it)
        r.window.push_back(*it);
    steps = 0;
    while (!(dom12(r.window.back()) && big(r.window.back()))) {
        if (++steps > max_steps)
            throw std::runtime_error("orbit_record: forward window exceeded " + std::to_string(max_steps) + " steps");
        const auto& last = r.window.back();
        r.window.push_back(detail::make_point(s, last.j + 1, F.apply(last.point)));
    }
    for (std::size_t k = 0; k + 1 < r.window.size(); ++k) {
        if (detail::mostly_in_3(s, r.window[k]) && detail::absolutely_in_12(s, r.window[k + 1])) {
            r.minimal_index = r.window[k].j;
            r.minimal_point = r.window[k].point;
            return r;
        }
    }
    throw std::runtime_error("orbit_record: no minimal point in window");
}

inline MinimalPoint minimal_point(const IntVec& v, const SpectralSplit& s, long long max_steps = 4096)
{
    auto r = orbit_record(v, s, 0, max_steps);
    return {r.minimal_index, r.minimal_point};
}

// Split of a dual map with 64-bit copies of the map and its inverse for fast orbit walks.
struct DualMap {
    SpectralSplit split;
    SmallIntMatrix fwd, bwd;

    DualMap() = default;
    explicit DualMap(SpectralSplit s) : split(std::move(s)), fwd(split.matrix), bwd(split.matrix.inverse()) {}
    const IntMatrix& matrix() const { return split.matrix; }
};

namespace detail {

inline std::array<double, 3> freq_norms(const SpectralSplit& s, const Freq& v)
{
    Eigen::VectorXd x(Eigen::Index(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        x(Eigen::Index(i)) = double(v[i]);
    return projection_norms(s, x);
}

// 64-bit orbit scan; empty when a near tie or a large coordinate needs the exact path
inline std::optional<std::pair<long long, Freq>> minimal_point_fast(const Freq& v, const DualMap& d,
                                                                    long long max_steps, double ratio)
{
    constexpr std::int64_t exact_limit = std::int64_t(1) << 52;
    struct P {
        long long j;
        Freq x;
        std::array<double, 3> nr;
    };
    auto ok = [&](const Freq& x) { return sup_norm(x) < exact_limit; };
    auto mk = [&](long long j, Freq x) { return P{j, x, freq_norms(d.split, x)}; };
    auto b12 = [](const P& p) { return std::max(p.nr[0], p.nr[1]); };
    std::vector<P> back;
    P cur = mk(0, v);
    Freq tmp(v.size());
    long long steps = 0;
    while (!(cur.nr[2] >= ratio * b12(cur))) {
        if (++steps > max_steps)
            return std::nullopt;
        back.push_back(cur);
        if (!d.bwd.apply(cur.x.data(), tmp.data()) || !ok(tmp))
            return std::nullopt;
        cur = mk(cur.j - 1, tmp);
    }
    std::vector<P> win{cur};
    for (auto it = back.rbegin(); it != back.rend(); ++it)
        win.push_back(*it);
    steps = 0;
    while (!(b12(win.back()) >= ratio * win.back().nr[2])) {
        if (++steps > max_steps)
            return std::nullopt;
        if (!d.fwd.apply(win.back().x.data(), tmp.data()) || !ok(tmp))
            return std::nullopt;
        win.push_back(mk(win.back().j + 1, tmp));
    }
    auto cmp = [&](const P& p) -> std::optional<int> {
        const double a = p.nr[2], b = b12(p);
        if (std::abs(a - b) <= 1e-9 * std::max(a, b))
            return std::nullopt;
        return a > b ? 1 : -1;
    };
    for (std::size_t k = 0; k + 1 < win.size(); ++k) {
        auto c0 = cmp(win[k]), c1 = cmp(win[k + 1]);
        if (!c0 || !c1)
            return std::nullopt;
        if (*c0 >= 0 && *c1 < 0)
            return std::make_pair(win[k].j, win[k].x);
    }
    return std::nullopt;
}

} // namespace detail

inline std::pair<long long, Freq> minimal_point(const Freq& v, const DualMap& d, long long max_steps = 4096)
{
    if (auto r = detail::minimal_point_fast(v, d, max_steps, 1e6))
        return *r;
    auto m = minimal_point(to_intvec(v), d.split, max_steps);
    return {m.j, to_freq(m.point)};
}

inline bool e_set_membership(const IntVec& v, const SpectralSplit& s) { return minimal_point(v, s).j == 0; }

// Minimal points of the orbits through a sample, deduplicated.
inline std::vector<IntVec> e_set_sample(const SpectralSplit& s, const std::vector<IntVec>& vs)
{
    std::set<IntVec> seen;
    std::vector<IntVec> out;
    for (const auto& v : vs) {
        auto m = minimal_point(v, s).point;
        if (seen.insert(m).second)
            out.push_back(std::move(m));
    }
    return out;
}

inline double katznelson_floor(const SpectralSplit& s, int sample_radius)
{
    const double N = double(s.dim());
    double floor = std::numeric_limits<double>::infinity();
    for (const auto& v : integer_ball(s.dim(), sample_radius)) {
        auto p = projection_norms(s, v);
        const double len = std::pow(euclid_norm(v), N);
        for (int i : {0, 2})
            if (s.dim(i + 1) > 0)
                floor = std::min(floor, p[i] * len);
    }
    return floor;
}

struct DisplacementViolation {
    IntVec v;
    std::size_t x_index = 0;
    int depth = 0;
    long long j = 0;
};

struct DisplacementReport {
    long long n = 0;
    std::size_t checked = 0;
    std::vector<DisplacementViolation> violations;
    bool below_threshold = false;
    std::string note;
};

// For v in E_{A^n}: M_{A^n}(D_i(A^n, x) v) = A^{nj} D_i(A^n, x) v with j in {0, +-1}.
// `a` is the split of the dual map A; xs are dual maps.
inline DisplacementReport verify_displacement(const SpectralSplit& a, const std::vector<IntMatrix>& xs, long long n,
                                              const std::vector<IntVec>& samples, const std::vector<int>& depths)
{
    if (n < 1)
        throw std::invalid_argument("verify_displacement: n must be >= 1");
    DisplacementReport rep;
    rep.n = n;
    const SpectralSplit an = power_split(a, n);
    const int max_depth = depths.empty() ? 0 : *std::max_element(depths.begin(), depths.end());
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        auto chain = commutator_chain(an.matrix, xs[xi], max_depth);
        for (int depth : depths) {
            const IntMatrix& d = chain.at(std::size_t(depth - 1));
            for (const auto& v : samples) {
                IntVec w = d.apply(v);
                ++rep.checked;
                long long j = minimal_point(w, an).j;
                if (j < -1 || j > 1)
                    rep.violations.push_back({v, xi, depth, j});
            }
        }
    }
    if (!rep.violations.empty()) {
        rep.below_threshold = true;
        rep.note = "below N1 threshold: " + std::to_string(rep.violations.size()) + " of " +
                   std::to_string(rep.checked) + " displaced points left the band j in {0, +-1}";
    }
    return rep;
}

struct ThresholdSearch {
    std::optional<long long> n;
    std::vector<DisplacementReport> reports;
};

// Smallest n in [1, n_max] with zero violations on E_{A^n}-representatives of the sample.
inline ThresholdSearch displacement_threshold(const SpectralSplit& a, const std::vector<IntMatrix>& xs,
                                              const std::vector<IntVec>& ball, const std::vector<int>& depths,
                                              long long n_max)
{
    ThresholdSearch out;
    for (long long n = 1; n <= n_max; ++n) {
        auto e = e_set_sample(power_split(a, n), ball);
        out.reports.push_back(verify_displacement(a, xs, n, e, depths));
        if (out.reports.back().violations.empty()) {
            out.n = n;
            break;
        }
    }
    return out;
}

struct WordCheckReport {
    long long n = 0;
    std::size_t checked = 0;
    std::vector<std::string> violations;
};

namespace detail {

inline std::string vec_str(const IntVec& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + to_string(v[i]);
    return s + ")";
}

} // namespace detail

// Exclusion rules for the words
//   d(i1) (A^n d(l1))^j1 d(i2) (A^n d(l2))^j2 (A^n d(l3))^j3,   d(i) = D_i(A^n, x),
// checked over sign-constant patterns with sum |j| <= max_total, and the one-letter words
// d(i1) (A^n d(l1))^j1 on points m steps below E_{A^n}.
inline WordCheckReport verify_word_exclusions(const SpectralSplit& a, const IntMatrix& x, long long n,
                                              const std::vector<IntVec>& e_points, int depth, int max_total = 4)
{
    WordCheckReport rep;
    rep.n = n;
    const SpectralSplit an = power_split(a, n);
    const IntMatrix& An = an.matrix;
    const IntMatrix Ani = An.inverse();
    auto d = commutator_chain(An, x, depth);
    std::vector<IntMatrix> step(static_cast<std::size_t>(depth)), step_inv(static_cast<std::size_t>(depth));
    for (int l = 0; l < depth; ++l) {
        step[l] = An * d[l];
        step_inv[l] = step[l].inverse();
    }
    auto power = [&](int l, int j) {
        IntMatrix r = IntMatrix::identity(x.dim());
        for (int k = 0; k < std::abs(j); ++k)
            r = r * (j > 0 ? step[l] : step_inv[l]);
        return r;
    };
    auto fail = [&](const std::string& rule, const std::string& word, const IntVec& v, long long z) {
        rep.violations.push_back(rule + " " + word + " v=" + detail::vec_str(v) + " z=" + std::to_string(z));
    };

    std::vector<std::array<int, 3>> patterns;
    for (int j1 = -max_total; j1 <= max_total; ++j1)
        for (int j2 = -max_total; j2 <= max_total; ++j2)
            for (int j3 = -max_total; j3 <= max_total; ++j3) {
                int tot = std::abs(j1) + std::abs(j2) + std::abs(j3);
                bool nonneg = j1 >= 0 && j2 >= 0 && j3 >= 0;
                bool nonpos = j1 <= 0 && j2 <= 0 && j3 <= 0;
                if (tot >= 2 && tot <= max_total && (nonneg || nonpos))
                    patterns.push_back({j1, j2, j3});
            }

    for (const auto& pat : patterns) {
        const bool nonneg = pat[0] >= 0 && pat[1] >= 0 && pat[2] >= 0;
        const int tot = std::abs(pat[0]) + std::abs(pat[1]) + std::abs(pat[2]);
        for (int i1 = 0; i1 < depth; ++i1)
            for (int i2 = 0; i2 < depth; ++i2)
                for (int l1 = 0; l1 < depth; ++l1)
                    for (int l2 = 0; l2 < depth; ++l2)
                        for (int l3 = 0; l3 < depth; ++l3) {
                            IntMatrix w = d[i1] * power(l1, pat[0]) * d[i2] * power(l2, pat[1]) * power(l3, pat[2]);
                            std::ostringstream name;
                            name << "A(" << l1 + 1 << l2 + 1 << l3 + 1 << ")_" << i1 + 1 << i2 + 1 << "^(" << pat[0]
                                 << "," << pat[1] << "," << pat[2] << ")";
                            for (const auto& v : e_points) {
                                long long z = minimal_point(w.apply(v), an).j;
                                ++rep.checked;
                                if (z == 0)
                                    fail("a", name.str(), v, z);
                                else if (tot >= 3 && (nonneg ? z > -2 : z < 2))
                                    fail("b", name.str(), v, z);
                            }
                        }
    }

    for (int m : {1, 2, -2, -3}) {
        const bool up = m >= 1;
        for (const auto& u : e_points) {
            IntVec v = u;
            for (int k = 0; k < std::abs(m); ++k)
                v = (m > 0 ? Ani : An).apply(v);
            for (int i1 = 0; i1 < depth; ++i1)
                for (int l1 = 0; l1 < depth; ++l1)
                    for (int j1 = -max_total; j1 <= max_total; ++j1) {
                        IntMatrix w = d[i1] * power(l1, j1);
                        long long z = minimal_point(w.apply(v), an).j;
                        ++rep.checked;
                        std::ostringstream name;
                        name << "d(" << i1 + 1 << ")(A^n d(" << l1 + 1 << "))^" << j1 << " m=" << m;
                        if ((up ? j1 <= -1 : j1 >= 0) && z == 0)
                            fail("a'", name.str(), v, z);
                        if (up && j1 <= -1 && z < 1)
                            fail("b'", name.str(), v, z);
                        if (!up && j1 >= 1 && z > -2)
                            fail("b'", name.str(), v, z);
                    }
        }
    }
    return rep;
}

} // namespace torikam

#endif
