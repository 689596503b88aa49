#ifndef TORIKAM_POLYNOMIAL_HPP
#define TORIKAM_POLYNOMIAL_HPP

#include "bigint.hpp"
#include "int_matrix.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace torikam {

// Dense polynomial, coefficients ascending by degree; the zero polynomial has no coefficients.
template <class T>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<T> c) : c_(std::move(c)) { trim(); }
    Poly(std::initializer_list<long long> c)
    {
        for (auto x : c)
            c_.emplace_back(x);
        trim();
    }

    static Poly constant(const T& a) { return Poly(std::vector<T>{a}); }
    static Poly monomial(std::size_t k, const T& a = T(1))
    {
        std::vector<T> c(k + 1);
        c[k] = a;
        return Poly(std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? -1 : int(c_.size()) - 1; }
    const T& lead() const { return c_.back(); }
    T coeff(std::size_t k) const { return k < c_.size() ? c_[k] : T(0); }
    const std::vector<T>& coeffs() const { return c_; }
    std::size_t size() const { return c_.size(); }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    friend Poly operator+(const Poly& a, const Poly& b)
    {
        std::vector<T> c(std::max(a.size(), b.size()));
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = a.coeff(i) + b.coeff(i);
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b)
    {
        std::vector<T> c(std::max(a.size(), b.size()));
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = a.coeff(i) - b.coeff(i);
        return Poly(std::move(c));
    }
    Poly operator-() const
    {
        std::vector<T> c = c_;
        for (auto& x : c)
            x = -x;
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const Poly& b)
    {
        if (a.is_zero() || b.is_zero())
            return Poly();
        std::vector<T> c(a.size() + b.size() - 1);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                c[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(c));
    }
    Poly scaled(const T& s) const
    {
        std::vector<T> c = c_;
        for (auto& x : c)
            x *= s;
        return Poly(std::move(c));
    }

    template <class U>
    U eval(const U& x) const
    {
        U r = U(0);
        for (std::size_t i = c_.size(); i-- > 0;)
            r = r * x + U(c_[i]);
        return r;
    }

    Poly derivative() const
    {
        if (c_.size() <= 1)
            return Poly();
        std::vector<T> c(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i)
            c[i - 1] = c_[i] * T(static_cast<long long>(i));
        return Poly(std::move(c));
    }

    // x^deg p(1/x)
    Poly reverse() const
    {
        std::vector<T> c(c_.rbegin(), c_.rend());
        return Poly(std::move(c));
    }

    friend std::ostream& operator<<(std::ostream& os, const Poly& p)
    {
        os << '[';
        for (std::size_t i = 0; i < p.c_.size(); ++i)
            os << (i ? "," : "") << p.c_[i];
        return os << ']';
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0)
            c_.pop_back();
    }
    std::vector<T> c_;
};

using IntPolynomial = Poly<BigInt>;
using QPoly = Poly<Rational>;

inline QPoly to_q(const IntPolynomial& p)
{
    std::vector<Rational> c;
    for (const auto& x : p.coeffs())
        c.emplace_back(x);
    return QPoly(std::move(c));
}

inline BigInt content(const IntPolynomial& p)
{
    BigInt g = 0;
    for (const auto& x : p.coeffs())
        g = gcd(g, x);
    return g;
}

// Scale a rational polynomial to a primitive integer polynomial with positive leading coefficient.
inline IntPolynomial primitive_part(const QPoly& p)
{
    if (p.is_zero())
        return IntPolynomial();
    BigInt l = 1;
    for (const auto& x : p.coeffs())
        l = lcm(l, denominator(x));
    std::vector<BigInt> c;
    for (const auto& x : p.coeffs())
        c.push_back(numerator(x) * (l / denominator(x)));
    IntPolynomial q(std::move(c));
    BigInt g = content(q);
    if (q.lead() < 0)
        g = -g;
    std::vector<BigInt> d;
    for (const auto& x : q.coeffs())
        d.push_back(x / g);
    return IntPolynomial(std::move(d));
}

inline IntPolynomial primitive_part(const IntPolynomial& p) { return primitive_part(to_q(p)); }

inline std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b)
{
    if (b.is_zero())
        throw std::domain_error("polynomial division by zero");
    std::vector<Rational> r = a.coeffs();
    const int db = b.degree();
    if (a.degree() < db)
        return {QPoly(), a};
    std::vector<Rational> q(a.degree() - db + 1);
    for (int k = a.degree() - db; k >= 0; --k) {
        Rational f = r[k + db] / b.lead();
        q[k] = f;
        if (f == 0)
            continue;
        for (int j = 0; j <= db; ++j)
            r[k + j] -= f * b.coeffs()[j];
    }
    return {QPoly(std::move(q)), QPoly(std::move(r))};
}

inline QPoly rem(const QPoly& a, const QPoly& b) { return divmod(a, b).second; }

// Primitive gcd with positive leading coefficient; gcd(0,0) = 0.
inline IntPolynomial poly_gcd(const IntPolynomial& a, const IntPolynomial& b)
{
    QPoly x = to_q(a), y = to_q(b);
    while (!y.is_zero()) {
        QPoly r = rem(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return primitive_part(x);
}

// Quotient a/b if b divides a with integral quotient.
inline std::optional<IntPolynomial> exact_div(const IntPolynomial& a, const IntPolynomial& b)
{
    auto [q, r] = divmod(to_q(a), to_q(b));
    if (!r.is_zero())
        return std::nullopt;
    std::vector<BigInt> c;
    for (const auto& x : q.coeffs()) {
        if (denominator(x) != 1)
            return std::nullopt;
        c.push_back(numerator(x));
    }
    return IntPolynomial(std::move(c));
}

inline bool divides(const IntPolynomial& b, const IntPolynomial& a)
{
    return rem(to_q(a), to_q(b)).is_zero();
}

// Yun: p = c * s[0] * s[1]^2 * s[2]^3 ..., each s[i] primitive squarefree (possibly constant 1).
inline std::vector<IntPolynomial> squarefree_decomposition(const IntPolynomial& p)
{
    std::vector<IntPolynomial> out;
    if (p.degree() <= 0)
        return out;
    IntPolynomial f = primitive_part(p);
    IntPolynomial fp = f.derivative();
    IntPolynomial a = poly_gcd(f, fp);
    QPoly b = divmod(to_q(f), to_q(a)).first;
    QPoly c = divmod(to_q(fp), to_q(a)).first;
    QPoly d = c - b.derivative();
    while (b.degree() > 0) {
        IntPolynomial bi = primitive_part(b);
        IntPolynomial di = primitive_part(d);
        IntPolynomial g = d.is_zero() ? bi : poly_gcd(bi, di);
        out.push_back(g);
        QPoly gq = to_q(g);
        b = divmod(b, gq).first;
        c = divmod(d, gq).first;
        d = c - b.derivative();
    }
    while (!out.empty() && out.back().degree() == 0)
        out.pop_back();
    return out;
}

inline bool is_squarefree(const IntPolynomial& p)
{
    return p.degree() <= 0 || poly_gcd(p, p.derivative()).degree() == 0;
}

inline long long euler_phi(long long n)
{
    long long r = n;
    for (long long p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            while (n % p == 0)
                n /= p;
            r -= r / p;
        }
    if (n > 1)
        r -= r / n;
    return r;
}

inline IntPolynomial cyclotomic(long long d)
{
    static std::mutex mu;
    static std::map<long long, IntPolynomial> cache;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(d);
        if (it != cache.end())
            return it->second;
    }
    IntPolynomial p = IntPolynomial::monomial(static_cast<std::size_t>(d)) - IntPolynomial{1};
    for (long long e = 1; e < d; ++e)
        if (d % e == 0)
            p = *exact_div(p, cyclotomic(e));
    std::lock_guard<std::mutex> lk(mu);
    cache.emplace(d, p);
    return p;
}

// Distinct real roots of p in the open interval (a, b); requires p(a), p(b) nonzero.
inline int sturm_count(const IntPolynomial& p, const Rational& a, const Rational& b)
{
    if (p.degree() <= 0)
        return 0;
    std::vector<QPoly> seq{to_q(p), to_q(p.derivative())};
    while (!seq.back().is_zero()) {
        QPoly r = rem(seq[seq.size() - 2], seq.back());
        if (r.is_zero())
            break;
        seq.push_back(-r);
    }
    auto changes = [&](const Rational& x) {
        int n = 0, last = 0;
        for (const auto& s : seq) {
            Rational v = s.eval(x);
            int sg = v > 0 ? 1 : (v < 0 ? -1 : 0);
            if (sg == 0)
                continue;
            if (last != 0 && sg != last)
                ++n;
            last = sg;
        }
        return n;
    };
    if (p.eval(a) == 0 || p.eval(b) == 0)
        throw std::domain_error("sturm_count endpoint is a root");
    return changes(a) - changes(b);
}

// Number of roots on |z| = 1 of a squarefree integer polynomial.
inline int unit_circle_count_squarefree(IntPolynomial s)
{
    std::size_t z = 0;
    while (z < s.size() && s.coeffs()[z] == 0)
        ++z;
    if (z > 0)
        s = IntPolynomial(std::vector<BigInt>(s.coeffs().begin() + z, s.coeffs().end()));
    IntPolynomial g = poly_gcd(s, s.reverse());
    int count = 0;
    const IntPolynomial xm1{-1, 1}, xp1{1, 1};
    if (auto q = exact_div(g, xm1)) {
        g = *q;
        ++count;
    }
    if (auto q = exact_div(g, xp1)) {
        g = *q;
        ++count;
    }
    if (g.degree() <= 0)
        return count;
    const int n = g.degree();
    if (n % 2 != 0)
        throw std::logic_error("self-reciprocal part has odd degree");
    for (int i = 0; i <= n; ++i)
        if (g.coeff(i) != g.coeff(n - i))
            throw std::logic_error("self-reciprocal part is not palindromic");
    // x^{-m} g(x) = h(x + 1/x)
    const int m = n / 2;
    std::vector<IntPolynomial> D{IntPolynomial{2}, IntPolynomial{0, 1}};
    const IntPolynomial y{0, 1};
    for (int k = 2; k <= m; ++k)
        D.push_back(y * D[k - 1] - D[k - 2]);
    IntPolynomial h = IntPolynomial::constant(g.coeff(m));
    for (int k = 1; k <= m; ++k)
        h = h + D[k].scaled(g.coeff(m + k));
    return count + 2 * sturm_count(h, Rational(-2), Rational(2));
}

// Roots on |z| = 1 counted with multiplicity.
inline int unit_circle_count(const IntPolynomial& p)
{
    int total = 0;
    auto parts = squarefree_decomposition(p);
    for (std::size_t i = 0; i < parts.size(); ++i)
        total += int(i + 1) * unit_circle_count_squarefree(parts[i]);
    return total;
}

// det(xI - m) by Faddeev-LeVerrier; every division is exact.
inline IntPolynomial char_poly(const SquareIntMatrix& a)
{
    const std::size_t n = a.dim();
    std::vector<BigInt> c(n + 1);
    c[n] = 1;
    SquareIntMatrix M(n);
    const SquareIntMatrix I = SquareIntMatrix::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        M = a * M + I.scaled(c[n - k + 1]);
        BigInt t = (a * M).trace();
        c[n - k] = -t / BigInt(k);
    }
    return IntPolynomial(std::move(c));
}

inline IntPolynomial char_poly(const IntMatrix& m) { return char_poly(m.square()); }

inline SquareIntMatrix companion(const IntPolynomial& p)
{
    const int n = p.degree();
    if (n < 1 || abs(p.lead()) != 1)
        throw std::invalid_argument("companion matrix needs a monic polynomial of positive degree");
    SquareIntMatrix c(n);
    for (int i = 1; i < n; ++i)
        c(i, i - 1) = 1;
    for (int i = 0; i < n; ++i)
        c(i, n - 1) = -p.coeff(i) * p.lead();
    return c;
}

// Simultaneous root refinement (Aberth-Ehrlich) for a squarefree polynomial.
inline std::vector<RealComplex> poly_roots(const IntPolynomial& p)
{
    const int n = p.degree();
    std::vector<RealComplex> z;
    if (n <= 0)
        return z;
    std::vector<RealComplex> c(n + 1), dc(n);
    for (int i = 0; i <= n; ++i)
        c[i] = RealComplex(Real(p.coeff(i)));
    for (int i = 1; i <= n; ++i)
        dc[i - 1] = c[i] * Real(i);
    Real bound = 0;
    for (int i = 0; i < n; ++i)
        bound = std::max(bound, Real(abs(p.coeff(i))) / Real(abs(p.lead())));
    bound += 1;
    Real r0 = std::min(bound, Real(2));
    for (int k = 0; k < n; ++k) {
        Real ang = Real(2) * boost::math::constants::pi<Real>() * (k + Real(0.25)) / n + Real(0.4);
        z.emplace_back(r0 * cos(ang), r0 * sin(ang));
    }
    auto horner = [](const std::vector<RealComplex>& a, const RealComplex& x) {
        RealComplex r(0);
        for (std::size_t i = a.size(); i-- > 0;)
            r = r * x + a[i];
        return r;
    };
    const Real eps = pow(Real(10), -(real_digits - 6));
    for (int it = 0; it < 2000; ++it) {
        Real maxstep = 0;
        for (int k = 0; k < n; ++k) {
            RealComplex f = horner(c, z[k]);
            RealComplex fp = horner(dc, z[k]);
            if (abs(f) == 0)
                continue;
            RealComplex ratio = f / fp;
            RealComplex s(0);
            for (int j = 0; j < n; ++j)
                if (j != k)
                    s += RealComplex(1) / (z[k] - z[j]);
            RealComplex w = ratio / (RealComplex(1) - ratio * s);
            z[k] -= w;
            maxstep = std::max(maxstep, Real(abs(w)) / std::max(Real(1), Real(abs(z[k]))));
        }
        if (maxstep < eps)
            break;
    }
    return z;
}

// Irreducible monic factors with multiplicity, via root-subset search confirmed by exact division.
inline std::vector<std::pair<IntPolynomial, int>> factor_monic(const IntPolynomial& p)
{
    if (p.degree() < 1 || abs(p.lead()) != 1)
        throw std::invalid_argument("factor_monic needs a monic polynomial");
    std::vector<std::pair<IntPolynomial, int>> out;
    auto parts = squarefree_decomposition(p);
    const Real tol = pow(Real(10), -20);
    for (std::size_t m = 0; m < parts.size(); ++m) {
        IntPolynomial rest = parts[m];
        if (rest.degree() <= 0)
            continue;
        std::vector<RealComplex> roots = poly_roots(rest);
        bool progress = true;
        while (progress && rest.degree() > 1) {
            progress = false;
            const int n = int(roots.size());
            for (int k = 1; k <= n / 2 && !progress; ++k) {
                std::vector<int> idx(k);
                for (int i = 0; i < k; ++i)
                    idx[i] = i;
                while (true) {
                    std::vector<RealComplex> prod{RealComplex(1)};
                    for (int i : idx) {
                        std::vector<RealComplex> next(prod.size() + 1, RealComplex(0));
                        for (std::size_t j = 0; j < prod.size(); ++j) {
                            next[j + 1] += prod[j];
                            next[j] -= prod[j] * roots[i];
                        }
                        prod = std::move(next);
                    }
                    bool integral = true;
                    std::vector<BigInt> cand;
                    for (const auto& c : prod) {
                        Real re = c.real(), im = c.imag();
                        Real rr = round(re);
                        if (abs(im) > tol || abs(re - rr) > tol * std::max(Real(1), abs(re))) {
                            integral = false;
                            break;
                        }
                        cand.push_back(rr.convert_to<BigInt>());
                    }
                    if (integral) {
                        IntPolynomial f(cand);
                        if (auto q = exact_div(rest, f)) {
                            out.emplace_back(f, int(m + 1));
                            rest = *q;
                            std::vector<RealComplex> left;
                            for (int i = 0, t = 0; i < n; ++i) {
                                if (t < k && idx[t] == i) {
                                    ++t;
                                    continue;
                                }
                                left.push_back(roots[i]);
                            }
                            roots = std::move(left);
                            progress = true;
                            break;
                        }
                    }
                    int i = k - 1;
                    while (i >= 0 && idx[i] == n - k + i)
                        --i;
                    if (i < 0)
                        break;
                    ++idx[i];
                    for (int j = i + 1; j < k; ++j)
                        idx[j] = idx[j - 1] + 1;
                }
            }
        }
        if (rest.degree() >= 1) {
            if (rest.lead() < 0)
                rest = -rest;
            out.emplace_back(rest, int(m + 1));
        }
    }
    return out;
}

inline bool is_irreducible(const IntPolynomial& p)
{
    auto f = factor_monic(p);
    return f.size() == 1 && f[0].second == 1;
}

} // namespace torikam

#endif
