#ifndef TORIKAM_COHOMOLOGY_HPP
#define TORIKAM_COHOMOLOGY_HPP

#include "dual_orbits.hpp"
#include "fourier_map.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace torikam {

// Integer matrix with entries converted to the scalar type, applied to coefficient vectors.
template <class T>
struct ScalarMatrix {
    std::size_t n = 0;
    std::vector<T> a;

    ScalarMatrix() = default;
    explicit ScalarMatrix(const IntMatrix& m) : n(m.dim()), a(n * n)
    {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                a[i * n + j] = T(m.square()(i, j));
    }

    CVec<T> operator*(const CVec<T>& c) const
    {
        CVec<T> out(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (a[i * n + j] != 0)
                    out[i] += a[i * n + j] * c[j];
        return out;
    }
};

template <class T>
void add_to(CVec<T>& acc, const CVec<T>& c)
{
    for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] += c[i];
}

// Powers P^e of a fixed unimodular matrix, cached, in the scalar type.
template <class T>
class PowerCache {
public:
    explicit PowerCache(IntMatrix p) : p_(std::move(p)), pi_(p_.inverse()) {}

    const ScalarMatrix<T>& get(long long e)
    {
        auto it = cache_.find(e);
        if (it != cache_.end())
            return it->second;
        IntMatrix m = e >= 0 ? p_.pow(e) : pi_.pow(-e);
        return cache_.emplace(e, ScalarMatrix<T>(m)).first->second;
    }

private:
    IntMatrix p_, pi_;
    std::map<long long, ScalarMatrix<T>> cache_;
};

// One dual orbit meeting the support: members[i] = (k, Q*^k rep).
struct OrbitGroup {
    Freq rep;
    std::vector<std::pair<long long, Freq>> members;
};

// Groups the nonzero support of theta by dual orbits of q*, keyed by minimal points.
template <class T>
std::vector<OrbitGroup> group_by_orbit(const FourierMap<T>& theta, const DualMap& qd)
{
    std::map<Freq, OrbitGroup> groups;
    for (const auto& kv : theta.coeffs()) {
        const Freq& v = kv.first;
        if (is_zero(v))
            continue;
        auto [j, m] = minimal_point(v, qd);
        auto& g = groups[m];
        g.rep = m;
        g.members.emplace_back(-j, v);
    }
    std::vector<OrbitGroup> out;
    out.reserve(groups.size());
    for (auto& kv : groups) {
        std::sort(kv.second.members.begin(), kv.second.members.end());
        out.push_back(std::move(kv.second));
    }
    return out;
}

template <class T>
struct OrbitEntry {
    Freq rep;
    long long k_min = 0, k_max = 0;
    std::size_t terms = 0;
    CVec<T> value; // sum_k P^{-(k+1)} theta_{Q*^k rep}
};

template <class T>
struct ObstructionReport {
    IntMatrix p, q;
    std::vector<OrbitEntry<T>> orbits;
    CVec<T> zero_term;
    double max_norm = 0;
    std::size_t support = 0;
};

struct TwistedPair {
    IntMatrix p, q;
    DualMap qd;

    TwistedPair(IntMatrix p_, IntMatrix q_) : p(std::move(p_)), q(std::move(q_))
    {
        if (p.dim() != q.dim())
            throw std::invalid_argument("twist and base have different dimensions");
        if (!is_ergodic(q))
            throw std::invalid_argument("base automorphism is not ergodic; dual orbits do not escape");
        qd = DualMap(split(q.dual(), 30, 0));
    }
};

// Obstructions sum_j P^{-(j+1)} theta_{Q*^j v}, one per dual orbit, anchored at the minimal point.
template <class T>
ObstructionReport<T> obstruction(const FourierMap<T>& theta, const TwistedPair& tp)
{
    if (theta.dim_in() != tp.q.dim() || theta.dim_out() != tp.p.dim())
        throw std::invalid_argument("obstruction: dimension mismatch");
    ObstructionReport<T> rep;
    rep.p = tp.p;
    rep.q = tp.q;
    rep.zero_term = theta.get(Freq(theta.dim_in(), 0));
    PowerCache<T> pw(tp.p);
    for (const auto& g : group_by_orbit(theta, tp.qd)) {
        OrbitEntry<T> e;
        e.rep = g.rep;
        e.k_min = g.members.front().first;
        e.k_max = g.members.back().first;
        e.terms = g.members.size();
        e.value = CVec<T>(theta.dim_out());
        for (const auto& [k, v] : g.members)
            add_to(e.value, pw.get(-(k + 1)) * theta.coeffs().at(v));
        rep.max_norm = std::max(rep.max_norm, cvec_norm(e.value));
        rep.orbits.push_back(std::move(e));
        rep.support += g.members.size();
    }
    return rep;
}

template <class T>
ObstructionReport<T> obstruction(const FourierMap<T>& theta, const IntMatrix& p, const IntMatrix& q)
{
    return obstruction(theta, TwistedPair(p, q));
}

namespace detail {

// Exact solution of A x = b over Q (free variables 0), or nothing when inconsistent.
inline std::optional<std::vector<Rational>> rational_solve(const SquareIntMatrix& a, const std::vector<Rational>& b)
{
    const std::size_t n = a.dim();
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = Rational(a(i, j));
        m[i][n] = b[i];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t piv = row;
        while (piv < n && m[piv][col] == 0)
            ++piv;
        if (piv == n)
            continue;
        std::swap(m[piv], m[row]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || m[i][col] == 0)
                continue;
            Rational f = m[i][col] / m[row][col];
            for (std::size_t j = col; j <= n; ++j)
                m[i][j] -= f * m[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t i = row; i < n; ++i)
        if (m[i][n] != 0)
            return std::nullopt;
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < row; ++i)
        x[pivot_col[i]] = m[i][n] / m[i][pivot_col[i]];
    return x;
}

inline Rational to_q(const Rational& x) { return x; }
inline Rational to_q(double x) { return Rational(x); }
template <class T>
T from_q(const Rational& x)
{
    if constexpr (std::is_same_v<T, double>)
        return x.convert_to<double>();
    else
        return x;
}

// (P - I) w = c for the mean; nothing when c is outside the range
template <class T>
std::optional<CVec<T>> solve_mean(const IntMatrix& p, const CVec<T>& c)
{
    SquareIntMatrix a = p.square() - SquareIntMatrix::identity(p.dim());
    const std::size_t n = p.dim();
    std::vector<Rational> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = to_q(c[i].re);
        im[i] = to_q(c[i].im);
    }
    auto xr = rational_solve(a, re), xi = rational_solve(a, im);
    if (!xr || !xi)
        return std::nullopt;
    CVec<T> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = Cx<T>(from_q<T>((*xr)[i]), from_q<T>((*xi)[i]));
    return out;
}

} // namespace detail

// P omega - omega o Q - theta
template <class T>
FourierMap<T> twisted_residual(const FourierMap<T>& omega, const FourierMap<T>& theta, const IntMatrix& p,
                               const IntMatrix& q)
{
    return apply_matrix(p, omega) - compose_auto(omega, q) - theta;
}

template <class T>
struct SolveResult {
    bool ok = false;
    std::string reason;
    FourierMap<T> omega;
    ObstructionReport<T> report;
    double residual = 0;       // max coefficient of the residual
    bool mean_solved = true;   // false when the mean lies outside range(P - I)
};

// Solves P omega - omega o Q = theta with omega_u = sum_{j >= 0} P^{-(j+1)} theta_{Q*^j u}.
template <class T>
SolveResult<T> solve_twisted(const FourierMap<T>& theta, const TwistedPair& tp, double tol)
{
    SolveResult<T> r;
    r.report = obstruction(theta, tp);
    r.omega = FourierMap<T>(theta.dim_in(), theta.dim_out());
    if (r.report.max_norm > tol) {
        r.reason = "obstruction " + std::to_string(r.report.max_norm) + " exceeds tolerance";
        return r;
    }
    PowerCache<T> pw(tp.p);
    const auto& pinv = pw.get(-1);
    for (const auto& g : group_by_orbit(theta, tp.qd)) {
        const long long k0 = g.members.front().first, k1 = g.members.back().first;
        // points Q*^k rep for k in [k0, k1]
        std::vector<Freq> pts;
        Freq x = g.rep;
        Freq tmp(x.size());
        for (long long k = 0; k > k0; --k) {
            if (!tp.qd.bwd.apply(x.data(), tmp.data()))
                throw std::overflow_error("solve_twisted: orbit leaves 64-bit range");
            x = tmp;
        }
        for (long long k = std::min<long long>(k0, 0); k <= k1; ++k) {
            if (k >= k0)
                pts.push_back(x);
            if (!tp.qd.fwd.apply(x.data(), tmp.data()))
                throw std::overflow_error("solve_twisted: orbit leaves 64-bit range");
            x = tmp;
        }
        CVec<T> w(theta.dim_out());
        for (long long k = k1; k >= k0; --k) {
            const Freq& u = pts[std::size_t(k - k0)];
            CVec<T> s = theta.get(u);
            add_to(s, w);
            w = pinv * s;
            if (-u < u)
                continue; // set() writes the mirror
            r.omega.set(u, w);
        }
        // the mirror orbit is handled as its own group; set() keeps both consistent
    }
    const Freq zero(theta.dim_in(), 0);
    CVec<T> t0 = theta.get(zero);
    auto w0 = detail::solve_mean(tp.p, t0);
    if (w0)
        r.omega.set(zero, *w0);
    else
        r.mean_solved = false;
    r.omega.prune();
    r.residual = max_coeff(twisted_residual(r.omega, theta, tp.p, tp.q));
    r.ok = r.mean_solved;
    r.reason = r.ok ? "solved" : "mean outside range(P - I)";
    return r;
}

template <class T>
SolveResult<T> solve_twisted(const FourierMap<T>& theta, const IntMatrix& p, const IntMatrix& q, double tol)
{
    return solve_twisted(theta, TwistedPair(p, q), tol);
}

// S_K = sum_{k in K} P1^k1 P2^k2 phi_{F1^k1 F2^k2 v}; F1, F2 act on frequencies.
template <class T>
CVec<T> weighted_sum(const FourierMap<T>& phi, const Freq& v, const IntMatrix& p1, const IntMatrix& p2,
                     const IntMatrix& f1, const IntMatrix& f2, const std::vector<std::array<int, 2>>& k_set)
{
    PowerCache<T> w1(p1), w2(p2);
    CVec<T> acc(phi.dim_out());
    const IntVec base = to_intvec(v);
    for (const auto& k : k_set) {
        IntVec u = f1.pow(k[0]).apply(f2.pow(k[1]).apply(base));
        bool fits = true;
        for (const auto& x : u)
            fits = fits && fits_i64(x);
        if (!fits)
            continue;
        auto it = phi.coeffs().find(to_freq(u));
        if (it == phi.coeffs().end())
            continue;
        add_to(acc, w1.get(k[0]) * (w2.get(k[1]) * it->second));
    }
    return acc;
}

inline std::vector<std::array<int, 2>> k_box(int bound)
{
    std::vector<std::array<int, 2>> ks;
    for (int a = -bound; a <= bound; ++a)
        for (int b = -bound; b <= bound; ++b)
            ks.push_back({a, b});
    return ks;
}

template <class T>
struct UnipotentSum {
    CVec<T> value;
    std::size_t terms = 0;
    double growth_floor = 0; // min over nonzero terms of |F^k1 Q^k2 v| / (rho^|k1| |k2|^(1/2) |v|^-n1)
};

// S_K = sum F^{-(k1+1)} Q^{-(k2+1)} phi_{F*^k1 Q*^k2 v}, frequencies moved by the duals.
template <class T>
UnipotentSum<T> weighted_sum_unipotent(const FourierMap<T>& phi, const Freq& v, const IntMatrix& f,
                                       const IntMatrix& q, const std::vector<std::array<int, 2>>& k_set,
                                       double rho = 1.0, double n1 = 0.0)
{
    if (!(f * q == q * f))
        throw std::invalid_argument("weighted_sum_unipotent: F and Q do not commute");
    const IntMatrix fd = f.dual(), qd = q.dual();
    const IntVec base = to_intvec(v);
    if (qd.apply(base) == base)
        throw std::invalid_argument("weighted_sum_unipotent: Q fixes v");
    PowerCache<T> wf(f), wq(q);
    UnipotentSum<T> out;
    out.value = CVec<T>(phi.dim_out());
    out.growth_floor = std::numeric_limits<double>::infinity();
    const double vn = euclid_norm(v);
    for (const auto& k : k_set) {
        IntVec u = fd.pow(k[0]).apply(qd.pow(k[1]).apply(base));
        bool fits = true;
        for (const auto& x : u)
            fits = fits && fits_i64(x);
        if (!fits)
            continue;
        auto it = phi.coeffs().find(to_freq(u));
        if (it == phi.coeffs().end())
            continue;
        add_to(out.value, wf.get(-(k[0] + 1)) * (wq.get(-(k[1] + 1)) * it->second));
        ++out.terms;
        if (k[1] != 0) {
            double rhs = std::pow(rho, std::abs(k[0])) * std::sqrt(std::abs(double(k[1]))) * std::pow(vn, -n1);
            out.growth_floor = std::min(out.growth_floor, euclid_norm(u) / rhs);
        }
    }
    return out;
}

struct TameFit {
    double a = 0;
    double sigma = 0;                    // fitted loss of regularity
    double c = 0;                        // max ||omega||_a / ||theta||_{a+sigma}
    std::vector<std::pair<double, double>> by_radius; // (support radius, max ||omega||_a / ||theta||_a)
};

// sigma from the growth of ||omega||_a / ||theta||_a with the support radius
template <class T>
TameFit fit_tame_exponent(const std::vector<std::pair<FourierMap<T>, FourierMap<T>>>& omega_theta, double a)
{
    TameFit f;
    f.a = a;
    std::map<double, double> worst;
    for (const auto& [om, th] : omega_theta) {
        double nt = norm_a(th, a);
        if (nt == 0)
            continue;
        double r = std::round(th.support_radius() * 4) / 4;
        worst[r] = std::max(worst[r], norm_a(om, a) / nt);
    }
    for (const auto& kv : worst)
        f.by_radius.push_back(kv);
    if (f.by_radius.size() >= 2) {
        double mx = 0, my = 0;
        for (const auto& [r, q] : f.by_radius) {
            mx += std::log(r);
            my += std::log(q);
        }
        mx /= double(f.by_radius.size());
        my /= double(f.by_radius.size());
        double sxy = 0, sxx = 0;
        for (const auto& [r, q] : f.by_radius) {
            sxy += (std::log(r) - mx) * (std::log(q) - my);
            sxx += (std::log(r) - mx) * (std::log(r) - mx);
        }
        f.sigma = std::max(0.0, sxx > 0 ? sxy / sxx : 0.0);
    }
    for (const auto& [om, th] : omega_theta) {
        double nt = norm_a(th, a + f.sigma);
        if (nt > 0)
            f.c = std::max(f.c, norm_a(om, a) / nt);
    }
    return f;
}

} // namespace torikam

#endif
