#ifndef TORIKAM_INT_MATRIX_HPP
#define TORIKAM_INT_MATRIX_HPP

#include "bigint.hpp"

#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace torikam {

// Square matrix over Z, no determinant constraint.
class SquareIntMatrix {
public:
    SquareIntMatrix() = default;
    explicit SquareIntMatrix(std::size_t n) : n_(n), a_(n * n) {}

    SquareIntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
    {
        n_ = rows.size();
        a_.reserve(n_ * n_);
        for (const auto& r : rows) {
            if (r.size() != n_)
                throw std::invalid_argument("matrix rows must form a square");
            for (auto x : r)
                a_.emplace_back(x);
        }
    }

    static SquareIntMatrix from_rows(const std::vector<std::vector<BigInt>>& rows)
    {
        SquareIntMatrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size())
                throw std::invalid_argument("matrix rows must form a square");
            for (std::size_t j = 0; j < rows.size(); ++j)
                m(i, j) = rows[i][j];
        }
        return m;
    }

    static SquareIntMatrix identity(std::size_t n)
    {
        SquareIntMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1;
        return m;
    }

    std::size_t dim() const { return n_; }
    BigInt& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const BigInt& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    friend bool operator==(const SquareIntMatrix& x, const SquareIntMatrix& y)
    {
        return x.n_ == y.n_ && x.a_ == y.a_;
    }
    friend bool operator!=(const SquareIntMatrix& x, const SquareIntMatrix& y) { return !(x == y); }

    friend SquareIntMatrix operator*(const SquareIntMatrix& x, const SquareIntMatrix& y)
    {
        if (x.n_ != y.n_)
            throw std::invalid_argument("dimension mismatch in matrix product");
        const std::size_t n = x.n_;
        SquareIntMatrix r(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const BigInt& xik = x(i, k);
                if (xik == 0)
                    continue;
                for (std::size_t j = 0; j < n; ++j)
                    r(i, j) += xik * y(k, j);
            }
        return r;
    }

    friend SquareIntMatrix operator+(const SquareIntMatrix& x, const SquareIntMatrix& y)
    {
        if (x.n_ != y.n_)
            throw std::invalid_argument("dimension mismatch in matrix sum");
        SquareIntMatrix r = x;
        for (std::size_t i = 0; i < r.a_.size(); ++i)
            r.a_[i] += y.a_[i];
        return r;
    }

    friend SquareIntMatrix operator-(const SquareIntMatrix& x, const SquareIntMatrix& y)
    {
        if (x.n_ != y.n_)
            throw std::invalid_argument("dimension mismatch in matrix difference");
        SquareIntMatrix r = x;
        for (std::size_t i = 0; i < r.a_.size(); ++i)
            r.a_[i] -= y.a_[i];
        return r;
    }

    SquareIntMatrix scaled(const BigInt& c) const
    {
        SquareIntMatrix r = *this;
        for (auto& x : r.a_)
            x *= c;
        return r;
    }

    IntVec apply(const IntVec& v) const
    {
        if (v.size() != n_)
            throw std::invalid_argument("dimension mismatch in matrix-vector product");
        IntVec r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                r[i] += (*this)(i, j) * v[j];
        return r;
    }

    SquareIntMatrix transpose() const
    {
        SquareIntMatrix r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                r(j, i) = (*this)(i, j);
        return r;
    }

    BigInt trace() const
    {
        BigInt t = 0;
        for (std::size_t i = 0; i < n_; ++i)
            t += (*this)(i, i);
        return t;
    }

    // Bareiss fraction-free elimination
    BigInt det() const
    {
        if (n_ == 0)
            return 1;
        std::vector<BigInt> m = a_;
        const std::size_t n = n_;
        auto at = [&](std::size_t i, std::size_t j) -> BigInt& { return m[i * n + j]; };
        BigInt prev = 1;
        int sign = 1;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (at(k, k) == 0) {
                std::size_t p = k + 1;
                while (p < n && at(p, k) == 0)
                    ++p;
                if (p == n)
                    return 0;
                for (std::size_t j = 0; j < n; ++j)
                    std::swap(at(k, j), at(p, j));
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j)
                    at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
            prev = at(k, k);
        }
        return sign * at(n - 1, n - 1);
    }

    SquareIntMatrix pow(unsigned long long e) const
    {
        SquareIntMatrix r = identity(n_);
        SquareIntMatrix b = *this;
        while (e) {
            if (e & 1)
                r = r * b;
            e >>= 1;
            if (e)
                b = b * b;
        }
        return r;
    }

    bool is_identity() const { return *this == identity(n_); }

    bool is_zero() const
    {
        for (const auto& x : a_)
            if (x != 0)
                return false;
        return true;
    }

    BigInt max_abs() const
    {
        BigInt m = 0;
        for (const auto& x : a_)
            m = std::max<BigInt>(m, abs(x));
        return m;
    }

    // operator 2-norm bound via Frobenius
    double frobenius() const
    {
        double s = 0;
        for (const auto& x : a_) {
            double d = to_double(x);
            s += d * d;
        }
        return std::sqrt(s);
    }

    std::vector<double> to_double_rowmajor() const
    {
        std::vector<double> r(a_.size());
        for (std::size_t i = 0; i < a_.size(); ++i)
            r[i] = to_double(a_[i]);
        return r;
    }

    const std::vector<BigInt>& data() const { return a_; }

    friend std::ostream& operator<<(std::ostream& os, const SquareIntMatrix& m)
    {
        os << '[';
        for (std::size_t i = 0; i < m.n_; ++i) {
            os << (i ? ",[" : "[");
            for (std::size_t j = 0; j < m.n_; ++j)
                os << (j ? "," : "") << m(i, j);
            os << ']';
        }
        return os << ']';
    }

private:
    std::size_t n_ = 0;
    std::vector<BigInt> a_;
};

// Exact inverse over Q by Gauss-Jordan; throws if singular.
inline std::vector<Rational> rational_inverse(const SquareIntMatrix& m)
{
    const std::size_t n = m.dim();
    std::vector<Rational> a(n * 2 * n);
    auto at = [&](std::size_t i, std::size_t j) -> Rational& { return a[i * 2 * n + j]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            at(i, j) = Rational(m(i, j));
        at(i, n + i) = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && at(p, c) == 0)
            ++p;
        if (p == n)
            throw std::domain_error("singular matrix");
        if (p != c)
            for (std::size_t j = 0; j < 2 * n; ++j)
                std::swap(at(p, j), at(c, j));
        Rational piv = at(c, c);
        for (std::size_t j = 0; j < 2 * n; ++j)
            at(c, j) /= piv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || at(i, c) == 0)
                continue;
            Rational f = at(i, c);
            for (std::size_t j = 0; j < 2 * n; ++j)
                at(i, j) -= f * at(c, j);
        }
    }
    std::vector<Rational> inv(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv[i * n + j] = at(i, n + j);
    return inv;
}

// Element of GL(N,Z).
class IntMatrix {
public:
    IntMatrix() = default;

    explicit IntMatrix(SquareIntMatrix m) : m_(std::move(m))
    {
        if (m_.dim() == 0)
            throw std::invalid_argument("matrix dimension must be positive");
        BigInt d = m_.det();
        if (d != 1 && d != -1)
            throw std::domain_error("determinant must be +1 or -1, got " + d.str());
        det_ = d == 1 ? 1 : -1;
    }

    IntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
        : IntMatrix(SquareIntMatrix(rows))
    {
    }

    static IntMatrix identity(std::size_t n) { return IntMatrix(SquareIntMatrix::identity(n), 1); }

    std::size_t dim() const { return m_.dim(); }
    int det() const { return det_; }
    const BigInt& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const SquareIntMatrix& square() const { return m_; }

    friend bool operator==(const IntMatrix& x, const IntMatrix& y) { return x.m_ == y.m_; }
    friend bool operator!=(const IntMatrix& x, const IntMatrix& y) { return !(x == y); }

    friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y)
    {
        return IntMatrix(x.m_ * y.m_, x.det_ * y.det_);
    }

    IntMatrix inverse() const
    {
        const std::size_t n = dim();
        auto inv = rational_inverse(m_);
        SquareIntMatrix r(n);
        for (std::size_t i = 0; i < n * n; ++i) {
            if (denominator(inv[i]) != 1)
                throw std::logic_error("unimodular inverse is not integral");
            r(i / n, i % n) = numerator(inv[i]);
        }
        return IntMatrix(std::move(r), det_);
    }

    IntMatrix transpose() const { return IntMatrix(m_.transpose(), det_); }

    IntMatrix pow(long long e) const
    {
        if (e >= 0)
            return IntMatrix(m_.pow(static_cast<unsigned long long>(e)), (e % 2) ? det_ : 1);
        return inverse().pow(-e);
    }

    // (F^T)^{-1}
    IntMatrix dual() const { return inverse().transpose(); }

    IntVec apply(const IntVec& v) const { return m_.apply(v); }

    bool is_identity() const { return m_.is_identity(); }

    friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) { return os << m.m_; }

private:
    IntMatrix(SquareIntMatrix m, int det) : m_(std::move(m)), det_(det) {}

    SquareIntMatrix m_;
    int det_ = 1;
};

inline IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b)
{
    if (a.dim() != b.dim())
        throw std::invalid_argument("dimension mismatch in matrix product");
    return a * b;
}

inline IntMatrix dual_map(const IntMatrix& m) { return m.dual(); }

inline IntMatrix block_diag(const std::vector<IntMatrix>& blocks)
{
    std::size_t n = 0;
    for (const auto& b : blocks)
        n += b.dim();
    SquareIntMatrix r(n);
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.dim(); ++i)
            for (std::size_t j = 0; j < b.dim(); ++j)
                r(off + i, off + j) = b(i, j);
        off += b.dim();
    }
    return IntMatrix(std::move(r));
}

// Kronecker product a (x) b
inline IntMatrix kron(const IntMatrix& a, const IntMatrix& b)
{
    const std::size_t p = a.dim(), q = b.dim();
    SquareIntMatrix r(p * q);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < q; ++k)
                for (std::size_t l = 0; l < q; ++l)
                    r(i * q + k, j * q + l) = a(i, j) * b(k, l);
    return IntMatrix(std::move(r));
}

// Fixed-size 64-bit copy for hot loops; apply reports overflow instead of wrapping.
class SmallIntMatrix {
public:
    SmallIntMatrix() = default;
    explicit SmallIntMatrix(const SquareIntMatrix& m) : n_(m.dim()), a_(m.dim() * m.dim())
    {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                if (!fits_i64(m(i, j)))
                    throw std::overflow_error("matrix entry exceeds 64 bits");
                a_[i * n_ + j] = m(i, j).convert_to<std::int64_t>();
            }
    }
    explicit SmallIntMatrix(const IntMatrix& m) : SmallIntMatrix(m.square()) {}

    std::size_t dim() const { return n_; }
    std::int64_t operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    bool apply(const std::int64_t* v, std::int64_t* out) const
    {
        for (std::size_t i = 0; i < n_; ++i) {
            std::int64_t s = 0;
            for (std::size_t j = 0; j < n_; ++j) {
                std::int64_t p;
                if (__builtin_mul_overflow(a_[i * n_ + j], v[j], &p) || __builtin_add_overflow(s, p, &s))
                    return false;
            }
            out[i] = s;
        }
        return true;
    }

    Freq apply(const Freq& v) const
    {
        Freq out(n_);
        if (!apply(v.data(), out.data()))
            throw std::overflow_error("frequency overflow under matrix action");
        return out;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::int64_t> a_;
};

} // namespace torikam

#endif
