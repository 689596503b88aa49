#ifndef TORIKAM_ARITHMETIC_HPP
#define TORIKAM_ARITHMETIC_HPP

#include "int_matrix.hpp"
#include "polynomial.hpp"

#include <utility>
#include <vector>

namespace torikam {

// A degree-N integer polynomial shares a root with some root of unity iff it
// shares one with a cyclotomic polynomial of degree phi(d) <= N; phi(d) >= sqrt(d/2).
inline bool has_root_of_unity(const IntPolynomial& p)
{
    const long long n = p.degree();
    if (n <= 0)
        return false;
    for (long long d = 1; d <= 2 * n * n; ++d) {
        if (euler_phi(d) > n)
            continue;
        if (poly_gcd(p, cyclotomic(d)).degree() > 0)
            return true;
    }
    return false;
}

inline bool is_ergodic(const IntMatrix& m) { return !has_root_of_unity(char_poly(m)); }

struct UnipotentVerdict {
    bool unipotent = false;
    int index = 0;
};

inline UnipotentVerdict is_unipotent(const SquareIntMatrix& m)
{
    const std::size_t n = m.dim();
    const SquareIntMatrix nil = m - SquareIntMatrix::identity(n);
    SquareIntMatrix p = nil;
    for (std::size_t j = 1; j <= n; ++j) {
        if (p.is_zero())
            return {true, int(j)};
        p = p * nil;
    }
    return {false, 0};
}

inline UnipotentVerdict is_unipotent(const IntMatrix& m) { return is_unipotent(m.square()); }

inline bool is_hyperbolic(const IntMatrix& m) { return unit_circle_count(char_poly(m)) == 0; }

// Basis of the rational kernel of m, scaled to primitive integer vectors.
inline std::vector<IntVec> integer_kernel(const SquareIntMatrix& m)
{
    const std::size_t n = m.dim();
    std::vector<Rational> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = Rational(m(i, j));
    auto at = [&](std::size_t i, std::size_t j) -> Rational& { return a[i * n + j]; };
    std::vector<int> pivot_col;
    std::size_t row = 0;
    for (std::size_t c = 0; c < n && row < n; ++c) {
        std::size_t p = row;
        while (p < n && at(p, c) == 0)
            ++p;
        if (p == n)
            continue;
        for (std::size_t j = 0; j < n; ++j)
            std::swap(at(p, j), at(row, j));
        Rational piv = at(row, c);
        for (std::size_t j = 0; j < n; ++j)
            at(row, j) /= piv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || at(i, c) == 0)
                continue;
            Rational f = at(i, c);
            for (std::size_t j = 0; j < n; ++j)
                at(i, j) -= f * at(row, j);
        }
        pivot_col.push_back(int(c));
        ++row;
    }
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_col)
        is_pivot[c] = true;
    std::vector<IntVec> basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f])
            continue;
        std::vector<Rational> v(n);
        v[f] = 1;
        for (std::size_t r = 0; r < pivot_col.size(); ++r)
            v[pivot_col[r]] = -at(r, f);
        BigInt l = 1;
        for (const auto& x : v)
            l = lcm(l, denominator(x));
        IntVec iv(n);
        BigInt g = 0;
        for (std::size_t i = 0; i < n; ++i) {
            iv[i] = numerator(v[i]) * (l / denominator(v[i]));
            g = gcd(g, iv[i]);
        }
        for (auto& x : iv)
            x /= g;
        basis.push_back(std::move(iv));
    }
    return basis;
}

// Fixed space of m, i.e. ker(m - I).
inline std::vector<IntVec> fixed_space(const IntMatrix& m)
{
    return integer_kernel(m.square() - SquareIntMatrix::identity(m.dim()));
}

// Rank over Q of a list of row vectors.
inline std::size_t rational_rank(std::vector<std::vector<Rational>> rows, std::size_t n)
{
    std::size_t rank = 0;
    for (std::size_t c = 0; c < n && rank < rows.size(); ++c) {
        std::size_t p = rank;
        while (p < rows.size() && rows[p][c] == 0)
            ++p;
        if (p == rows.size())
            continue;
        std::swap(rows[p], rows[rank]);
        for (std::size_t i = rank + 1; i < rows.size(); ++i) {
            if (rows[i][c] == 0)
                continue;
            Rational f = rows[i][c] / rows[rank][c];
            for (std::size_t j = c; j < n; ++j)
                rows[i][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

inline std::size_t rational_rank(const std::vector<IntVec>& vecs, std::size_t n)
{
    std::vector<std::vector<Rational>> rows;
    for (const auto& v : vecs) {
        std::vector<Rational> r(n);
        for (std::size_t j = 0; j < n; ++j)
            r[j] = Rational(v[j]);
        rows.push_back(std::move(r));
    }
    return rational_rank(std::move(rows), n);
}

// Dimension of the intersection of the kernels of a list of integer matrices.
inline std::size_t common_kernel_dim(const std::vector<SquareIntMatrix>& ms)
{
    if (ms.empty())
        return 0;
    const std::size_t n = ms[0].dim();
    std::vector<std::vector<Rational>> rows;
    for (const auto& m : ms)
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Rational> r(n);
            for (std::size_t j = 0; j < n; ++j)
                r[j] = Rational(m(i, j));
            rows.push_back(std::move(r));
        }
    return n - rational_rank(std::move(rows), n);
}

} // namespace torikam

#endif
