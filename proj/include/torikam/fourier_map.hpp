#ifndef TORIKAM_FOURIER_MAP_HPP
#define TORIKAM_FOURIER_MAP_HPP

#include "int_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace torikam {

inline double to_double(double x) { return x; }

// Complex number over an arbitrary field; std::complex is only specified for float types.
template <class T>
struct Cx {
    T re{}, im{};

    Cx() = default;
    Cx(T r) : re(std::move(r)) {}
    Cx(T r, T i) : re(std::move(r)), im(std::move(i)) {}

    Cx& operator+=(const Cx& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    Cx& operator-=(const Cx& o)
    {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend Cx operator+(Cx a, const Cx& b) { return a += b; }
    friend Cx operator-(Cx a, const Cx& b) { return a -= b; }
    friend Cx operator-(const Cx& a) { return Cx(-a.re, -a.im); }
    friend Cx operator*(const Cx& a, const Cx& b) { return Cx(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re); }
    friend Cx operator*(const T& s, const Cx& a) { return Cx(s * a.re, s * a.im); }
    friend bool operator==(const Cx& a, const Cx& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Cx& a, const Cx& b) { return !(a == b); }

    Cx conj() const { return Cx(re, -im); }
    bool is_zero() const { return re == 0 && im == 0; }
};

template <class T>
double abs2(const Cx<T>& c)
{
    double r = to_double(c.re), i = to_double(c.im);
    return r * r + i * i;
}

template <class T>
using CVec = std::vector<Cx<T>>;

template <class T>
double abs2_sum(const CVec<T>& c)
{
    double s = 0;
    for (const auto& x : c)
        s += abs2(x);
    return s;
}

template <class T>
double cvec_norm(const CVec<T>& c)
{
    double s = 0;
    for (const auto& x : c)
        s += abs2(x);
    return std::sqrt(s);
}

inline Freq operator-(const Freq& v) { return negate(v); }

// Finitely supported Fourier series of a map T^N -> R^m:
//   theta(x) = sum_v c_v e^{2 pi i v.x},  c_{-v} = conj(c_v).
// Both v and -v are stored.
template <class T>
class FourierMap {
public:
    using Coeff = CVec<T>;
    using Storage = std::map<Freq, Coeff>;

    FourierMap() = default;
    FourierMap(std::size_t dim_in, std::size_t dim_out) : n_(dim_in), m_(dim_out) {}

    std::size_t dim_in() const { return n_; }
    std::size_t dim_out() const { return m_; }
    const Storage& coeffs() const { return c_; }
    std::size_t size() const { return c_.size(); }
    bool empty() const { return c_.empty(); }

    Coeff zero_coeff() const { return Coeff(m_); }

    Coeff get(const Freq& v) const
    {
        auto it = c_.find(v);
        return it == c_.end() ? zero_coeff() : it->second;
    }

    // sets c_v and c_{-v} = conj(c_v); at v = 0 the imaginary part must vanish
    void set(const Freq& v, const Coeff& c)
    {
        check_freq(v);
        if (c.size() != m_)
            throw std::invalid_argument("coefficient has the wrong length");
        bool zero = true;
        for (const auto& x : c)
            zero = zero && x.is_zero();
        if (is_zero(v)) {
            for (const auto& x : c)
                if (x.im != 0)
                    throw std::invalid_argument("mean coefficient must be real");
            if (zero)
                c_.erase(v);
            else
                c_[v] = c;
            return;
        }
        Freq w = -v;
        if (zero) {
            c_.erase(v);
            c_.erase(w);
            return;
        }
        c_[v] = c;
        Coeff cc(m_);
        for (std::size_t i = 0; i < m_; ++i)
            cc[i] = c[i].conj();
        c_[w] = std::move(cc);
    }

    // adds to c_v and its mirror
    void add(const Freq& v, const Coeff& c)
    {
        Coeff cur = get(v);
        for (std::size_t i = 0; i < m_; ++i)
            cur[i] += c[i];
        set(v, cur);
    }

    bool is_real() const
    {
        for (const auto& [v, c] : c_) {
            if (is_zero(v)) {
                for (const auto& x : c)
                    if (x.im != 0)
                        return false;
                continue;
            }
            auto it = c_.find(-v);
            if (it == c_.end())
                return false;
            for (std::size_t i = 0; i < m_; ++i)
                if (it->second[i] != c[i].conj())
                    return false;
        }
        return true;
    }

    double support_radius() const
    {
        double r = 0;
        for (const auto& kv : c_)
            r = std::max(r, euclid_norm(kv.first));
        return r;
    }

    std::int64_t support_sup() const
    {
        std::int64_t r = 0;
        for (const auto& kv : c_)
            r = std::max(r, sup_norm(kv.first));
        return r;
    }

    FourierMap& operator+=(const FourierMap& o)
    {
        check_same(o);
        for (const auto& [v, c] : o.c_) {
            auto it = c_.find(v);
            if (it == c_.end()) {
                c_.emplace(v, c);
                continue;
            }
            for (std::size_t i = 0; i < m_; ++i)
                it->second[i] += c[i];
        }
        prune();
        return *this;
    }

    FourierMap& operator-=(const FourierMap& o)
    {
        check_same(o);
        for (const auto& [v, c] : o.c_) {
            auto it = c_.find(v);
            if (it == c_.end()) {
                Coeff neg(m_);
                for (std::size_t i = 0; i < m_; ++i)
                    neg[i] = -c[i];
                c_.emplace(v, std::move(neg));
                continue;
            }
            for (std::size_t i = 0; i < m_; ++i)
                it->second[i] -= c[i];
        }
        prune();
        return *this;
    }

    friend FourierMap operator+(FourierMap a, const FourierMap& b) { return a += b; }
    friend FourierMap operator-(FourierMap a, const FourierMap& b) { return a -= b; }
    friend FourierMap operator*(const T& s, FourierMap a)
    {
        for (auto& kv : a.c_)
            for (auto& x : kv.second)
                x = s * x;
        a.prune();
        return a;
    }
    friend bool operator==(const FourierMap& a, const FourierMap& b)
    {
        return a.n_ == b.n_ && a.m_ == b.m_ && a.c_ == b.c_;
    }

    // raw insert used by reindexing; caller keeps the reality invariant
    void put_raw(const Freq& v, Coeff c) { c_[v] = std::move(c); }

    void prune()
    {
        for (auto it = c_.begin(); it != c_.end();) {
            bool zero = true;
            for (const auto& x : it->second)
                zero = zero && x.is_zero();
            it = zero ? c_.erase(it) : std::next(it);
        }
    }

private:
    void check_freq(const Freq& v) const
    {
        if (v.size() != n_)
            throw std::invalid_argument("frequency has the wrong dimension");
    }
    void check_same(const FourierMap& o) const
    {
        if (o.n_ != n_ || o.m_ != m_)
            throw std::invalid_argument("FourierMap shape mismatch");
    }

    std::size_t n_ = 0, m_ = 0;
    Storage c_;
};

using FourierMapD = FourierMap<double>;
using FourierMapQ = FourierMap<Rational>;

// theta o F: the coefficient at v moves to F^T v.
template <class T>
FourierMap<T> compose_auto(const FourierMap<T>& theta, const IntMatrix& f)
{
    if (f.dim() != theta.dim_in())
        throw std::invalid_argument("compose_auto: dimension mismatch");
    SmallIntMatrix ft(f.transpose());
    FourierMap<T> r(theta.dim_in(), theta.dim_out());
    for (const auto& [v, c] : theta.coeffs())
        r.put_raw(ft.apply(v), c);
    return r;
}

// M . theta for an integer matrix acting on the values
template <class T>
FourierMap<T> apply_matrix(const IntMatrix& m, const FourierMap<T>& theta)
{
    if (m.dim() != theta.dim_out())
        throw std::invalid_argument("apply_matrix: dimension mismatch");
    const std::size_t k = theta.dim_out();
    std::vector<T> a(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            a[i * k + j] = T(m.square()(i, j));
    FourierMap<T> r(theta.dim_in(), k);
    for (const auto& [v, c] : theta.coeffs()) {
        CVec<T> out(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (a[i * k + j] != 0)
                    out[i] += a[i * k + j] * c[j];
        r.put_raw(v, std::move(out));
    }
    r.prune();
    return r;
}

// Delta_F omega = F omega - omega o F
template <class T>
FourierMap<T> twisted_diff(const FourierMap<T>& omega, const IntMatrix& f)
{
    return apply_matrix(f, omega) - compose_auto(omega, f);
}

// sup_v |c_v| |v|^a with the Euclidean |v|; the mean counts only at a = 0
template <class T>
double norm_a(const FourierMap<T>& theta, double a)
{
    if (a < 0)
        throw std::invalid_argument("norm_a: a must be >= 0");
    double r = 0;
    for (const auto& [v, c] : theta.coeffs()) {
        double len = euclid_norm(v);
        double w = a == 0 ? 1.0 : (len == 0 ? 0.0 : std::pow(len, a));
        r = std::max(r, cvec_norm(c) * w);
    }
    return r;
}

// sum_v |c_v| (1 + |v|)^r, an upper bound for the C^r norm up to a dimensional constant
template <class T>
double cr_proxy(const FourierMap<T>& theta, int r)
{
    double s = 0;
    for (const auto& [v, c] : theta.coeffs())
        s += cvec_norm(c) * std::pow(1 + euclid_norm(v), double(r));
    return s;
}

template <class T>
double c0_proxy(const FourierMap<T>& theta)
{
    return cr_proxy(theta, 0);
}

template <class T>
double l2_norm(const FourierMap<T>& theta)
{
    double s = 0;
    for (const auto& [v, c] : theta.coeffs())
        s += abs2_sum(c);
    return std::sqrt(s);
}

template <class T>
double max_coeff(const FourierMap<T>& theta)
{
    double r = 0;
    for (const auto& [v, c] : theta.coeffs())
        r = std::max(r, cvec_norm(c));
    return r;
}

// Drops modes with |v| > radius; returns the l2 norm of what was dropped.
template <class T>
double truncate(FourierMap<T>& theta, double radius)
{
    FourierMap<T> kept(theta.dim_in(), theta.dim_out());
    double dropped = 0;
    for (const auto& [v, c] : theta.coeffs()) {
        if (euclid_norm(v) <= radius + 1e-12)
            kept.put_raw(v, c);
        else
            dropped += abs2_sum(c);
    }
    theta = std::move(kept);
    return std::sqrt(dropped);
}

inline FourierMapQ to_rational(const FourierMapD& d)
{
    FourierMapQ q(d.dim_in(), d.dim_out());
    for (const auto& [v, c] : d.coeffs()) {
        CVec<Rational> out(c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            out[i] = Cx<Rational>(Rational(c[i].re), Rational(c[i].im));
        q.put_raw(v, std::move(out));
    }
    return q;
}

inline FourierMapD to_double(const FourierMapQ& q)
{
    FourierMapD d(q.dim_in(), q.dim_out());
    for (const auto& [v, c] : q.coeffs()) {
        CVec<double> out(c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            out[i] = Cx<double>(to_double(c[i].re), to_double(c[i].im));
        d.put_raw(v, std::move(out));
    }
    d.prune();
    return d;
}

// Lattice points of the Euclidean ball (including 0), in lexicographic order.
inline std::vector<Freq> freq_ball(std::size_t n, double radius)
{
    std::vector<Freq> out;
    const std::int64_t r = std::int64_t(std::floor(radius + 1e-12));
    Freq x(n, -r);
    if (n == 0)
        return out;
    while (true) {
        if (euclid_norm(x) <= radius + 1e-12)
            out.push_back(x);
        std::size_t k = n;
        while (k > 0 && x[k - 1] == r)
            x[--k] = -r;
        if (k == 0)
            break;
        ++x[k - 1];
    }
    return out;
}

// Random real map with modes in a ball, one representative per +-v pair.
// Coefficients uniform in the square [-amp, amp]^2, or on a rational grid of step amp/den.
inline FourierMapD random_map(std::size_t n, std::size_t m, double radius, double amp, std::mt19937_64& rng,
                              bool with_mean = false)
{
    FourierMapD r(n, m);
    std::uniform_real_distribution<double> u(-amp, amp);
    for (const auto& v : freq_ball(n, radius)) {
        bool zero = is_zero(v);
        if (zero && !with_mean)
            continue;
        if (!zero && -v < v)
            continue;
        CVec<double> c(m);
        for (auto& x : c)
            x = zero ? Cx<double>(u(rng)) : Cx<double>(u(rng), u(rng));
        r.set(v, c);
    }
    return r;
}

inline FourierMapQ random_rational_map(std::size_t n, std::size_t m, double radius, int den, std::mt19937_64& rng,
                                       bool with_mean = false)
{
    FourierMapQ r(n, m);
    std::uniform_int_distribution<int> u(-den, den);
    for (const auto& v : freq_ball(n, radius)) {
        bool zero = is_zero(v);
        if (zero && !with_mean)
            continue;
        if (!zero && -v < v)
            continue;
        CVec<Rational> c(m);
        for (auto& x : c)
            x = zero ? Cx<Rational>(Rational(u(rng), den)) : Cx<Rational>(Rational(u(rng), den), Rational(u(rng), den));
        r.set(v, c);
    }
    return r;
}

// Pointwise value at x (direct summation), real part of each output.
template <class T>
std::vector<double> evaluate_at(const FourierMap<T>& theta, const std::vector<double>& x)
{
    std::vector<double> out(theta.dim_out(), 0.0);
    for (const auto& [v, c] : theta.coeffs()) {
        double ph = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            ph += double(v[i]) * x[i];
        ph *= 2 * M_PI;
        const double cs = std::cos(ph), sn = std::sin(ph);
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] += to_double(c[k].re) * cs - to_double(c[k].im) * sn;
    }
    return out;
}

} // namespace torikam

#endif
