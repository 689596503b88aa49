#ifndef TORIKAM_BIGINT_HPP
#define TORIKAM_BIGINT_HPP

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace torikam {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Real = boost::multiprecision::cpp_bin_float_50;
using RealComplex = boost::multiprecision::cpp_complex_50;

using IntVec = std::vector<BigInt>;
using Freq = std::vector<std::int64_t>;

// digits carried by Real
inline constexpr int real_digits = 50;

inline std::string to_string(const BigInt& x) { return x.str(); }

inline BigInt parse_bigint(const std::string& s)
{
    if (s.empty())
        throw std::invalid_argument("empty integer literal");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size())
        throw std::invalid_argument("bad integer literal: " + s);
    for (std::size_t k = i; k < s.size(); ++k)
        if (s[k] < '0' || s[k] > '9')
            throw std::invalid_argument("bad integer literal: " + s);
    return BigInt(s);
}

inline double to_double(const BigInt& x) { return x.convert_to<double>(); }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(const Real& x) { return x.convert_to<double>(); }

inline bool fits_i64(const BigInt& x)
{
    static const BigInt lo = std::numeric_limits<std::int64_t>::min();
    static const BigInt hi = std::numeric_limits<std::int64_t>::max();
    return x >= lo && x <= hi;
}

inline IntVec to_intvec(const Freq& v)
{
    IntVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v[i];
    return out;
}

inline Freq to_freq(const IntVec& v)
{
    Freq out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!fits_i64(v[i]))
            throw std::overflow_error("frequency component exceeds 64 bits");
        out[i] = v[i].convert_to<std::int64_t>();
    }
    return out;
}

inline bool is_zero(const IntVec& v)
{
    for (const auto& x : v)
        if (x != 0)
            return false;
    return true;
}

inline bool is_zero(const Freq& v)
{
    for (auto x : v)
        if (x != 0)
            return false;
    return true;
}

inline double euclid_norm(const IntVec& v)
{
    double s = 0;
    for (const auto& x : v) {
        double d = to_double(x);
        s += d * d;
    }
    return std::sqrt(s);
}

inline double euclid_norm(const Freq& v)
{
    double s = 0;
    for (auto x : v)
        s += double(x) * double(x);
    return std::sqrt(s);
}

inline std::int64_t sup_norm(const Freq& v)
{
    std::int64_t m = 0;
    for (auto x : v)
        m = std::max<std::int64_t>(m, x < 0 ? -x : x);
    return m;
}

inline BigInt sup_norm(const IntVec& v)
{
    BigInt m = 0;
    for (const auto& x : v)
        m = std::max<BigInt>(m, abs(x));
    return m;
}

inline Freq negate(const Freq& v)
{
    Freq out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = -v[i];
    return out;
}

} // namespace torikam

#endif
