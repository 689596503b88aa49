#ifndef TORIKAM_SPECTRAL_HPP
#define TORIKAM_SPECTRAL_HPP

#include "arithmetic.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace torikam {

using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

struct precision_exhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigenInfo {
    RealComplex value;
    int multiplicity = 1;
    int cls = 2; // 1 expanding, 2 neutral, 3 contracting
};

struct SpectralSplit {
    IntMatrix matrix;
    int precision = 30;
    std::vector<EigenInfo> eigen;
    std::array<MatR, 3> basis_mp;        // orthonormal columns per class
    std::array<Eigen::MatrixXd, 3> basis; // double copies
    std::array<MatR, 3> proj_mp;         // oblique projections, sum to identity
    std::array<Eigen::MatrixXd, 3> proj;
    double rho = 1.0;
    double c_const = 1.0;

    std::size_t dim() const { return matrix.dim(); }
    std::size_t dim(int i) const { return std::size_t(basis[i - 1].cols()); }
};

namespace detail {

inline MatR to_mp(const SquareIntMatrix& m)
{
    const std::size_t n = m.dim();
    MatR r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r(i, j) = Real(m(i, j));
    return r;
}

inline Eigen::MatrixXd to_double(const MatR& m)
{
    Eigen::MatrixXd r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            r(i, j) = m(i, j).convert_to<double>();
    return r;
}

inline Eigen::MatrixXd to_double(const SquareIntMatrix& m)
{
    const std::size_t n = m.dim();
    Eigen::MatrixXd r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r(i, j) = torikam::to_double(m(i, j));
    return r;
}

// Newton polish of a simple root
inline RealComplex polish_root(const IntPolynomial& p, RealComplex z)
{
    IntPolynomial dp = p.derivative();
    for (int it = 0; it < 8; ++it) {
        RealComplex f(0), fp(0);
        for (std::size_t i = p.size(); i-- > 0;)
            f = f * z + RealComplex(Real(p.coeff(i)));
        for (std::size_t i = dp.size(); i-- > 0;)
            fp = fp * z + RealComplex(Real(dp.coeff(i)));
        if (abs(fp) == 0)
            break;
        z -= f / fp;
    }
    return z;
}

// Eigenvalues with multiplicities; neutral ones certified by exact unit-circle counts.
inline std::vector<EigenInfo> classified_eigenvalues(const IntPolynomial& cp)
{
    std::vector<EigenInfo> out;
    auto parts = squarefree_decomposition(cp);
    const Real on_circle = pow(Real(10), -35);
    const Real off_circle = pow(Real(10), -25);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const IntPolynomial& s = parts[k];
        if (s.degree() <= 0)
            continue;
        int unit = unit_circle_count_squarefree(s);
        auto roots = poly_roots(s);
        std::vector<std::pair<Real, RealComplex>> keyed;
        for (auto& z : roots) {
            z = polish_root(s, z);
            keyed.emplace_back(abs(log(Real(abs(z)))), z);
        }
        std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        if (unit > 0 && keyed[unit - 1].first > on_circle)
            throw precision_exhausted("unit-circle roots not resolved at working precision");
        if (unit < int(keyed.size()) && keyed[unit].first < off_circle)
            throw precision_exhausted("roots near the unit circle not separated at working precision");
        for (int i = 0; i < int(keyed.size()); ++i) {
            EigenInfo e;
            e.value = keyed[i].second;
            e.multiplicity = int(k + 1);
            if (i < unit)
                e.cls = 2;
            else
                e.cls = abs(keyed[i].second) > 1 ? 1 : 3;
            out.push_back(e);
        }
    }
    return out;
}

// Orthonormal basis of ker prod (F - z)^m over the given eigenvalues.
inline MatR generalized_eigenspace(const MatR& F, const std::vector<EigenInfo>& eig)
{
    const Eigen::Index n = F.rows();
    int d = 0;
    std::vector<RealComplex> q{RealComplex(1)};
    for (const auto& e : eig) {
        d += e.multiplicity;
        for (int m = 0; m < e.multiplicity; ++m) {
            std::vector<RealComplex> next(q.size() + 1, RealComplex(0));
            for (std::size_t j = 0; j < q.size(); ++j) {
                next[j + 1] += q[j];
                next[j] -= q[j] * e.value;
            }
            q = std::move(next);
        }
    }
    if (d == 0)
        return MatR(n, 0);
    if (d == n)
        return MatR::Identity(n, n);
    MatR Q = MatR::Zero(n, n);
    for (std::size_t i = q.size(); i-- > 0;) {
        Q = (Q * F).eval();
        for (Eigen::Index r = 0; r < n; ++r)
            Q(r, r) += q[i].real();
    }
    Eigen::JacobiSVD<MatR> svd(Q, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Real top = sv(0);
    if (top == 0)
        return MatR::Identity(n, n);
    if (sv(n - d) > top * pow(Real(10), -25))
        throw precision_exhausted("invariant subspace kernel not resolved");
    if (n - d - 1 >= 0 && sv(n - d - 1) < top * pow(Real(10), -15))
        throw precision_exhausted("invariant subspace kernel rank ambiguous");
    return svd.matrixV().rightCols(d);
}

} // namespace detail

inline double growth_constant_fit(const SpectralSplit& s, int sample_radius);

// Expanding / neutral / contracting splitting of R^N for m.
inline SpectralSplit split(const IntMatrix& m, int precision = 30, int fit_radius = 4)
{
    if (precision > real_digits - 5)
        throw precision_exhausted("requested " + std::to_string(precision) + " digits exceeds working precision");
    SpectralSplit s;
    s.matrix = m;
    s.precision = precision;
    s.eigen = detail::classified_eigenvalues(char_poly(m));
    const MatR F = detail::to_mp(m.square());
    const Eigen::Index n = F.rows();
    std::array<std::vector<EigenInfo>, 3> by;
    for (const auto& e : s.eigen)
        by[e.cls - 1].push_back(e);
    MatR B(n, n);
    Eigen::Index col = 0;
    std::array<Eigen::Index, 3> start{};
    for (int i = 0; i < 3; ++i) {
        s.basis_mp[i] = detail::generalized_eigenspace(F, by[i]);
        start[i] = col;
        if (s.basis_mp[i].cols() > 0)
            B.middleCols(col, s.basis_mp[i].cols()) = s.basis_mp[i];
        col += s.basis_mp[i].cols();
        s.basis[i] = detail::to_double(s.basis_mp[i]);
    }
    if (col != n)
        throw precision_exhausted("subspace dimensions do not sum to N");
    Eigen::FullPivLU<MatR> lu(B);
    if (!lu.isInvertible())
        throw precision_exhausted("spectral basis is singular at working precision");
    MatR Binv = lu.inverse();
    for (int i = 0; i < 3; ++i) {
        const Eigen::Index d = s.basis_mp[i].cols();
        if (d == 0)
            s.proj_mp[i] = MatR::Zero(n, n);
        else
            s.proj_mp[i] = s.basis_mp[i] * Binv.middleRows(start[i], d);
        s.proj[i] = detail::to_double(s.proj_mp[i]);
    }
    // invariance check at half the requested digits
    const Real tol = pow(Real(10), -precision / 2);
    for (int i = 0; i < 3; ++i) {
        if (s.basis_mp[i].cols() == 0)
            continue;
        MatR FB = F * s.basis_mp[i];
        MatR res = FB - s.proj_mp[i] * FB;
        if (res.cwiseAbs().maxCoeff() > tol * (1 + FB.cwiseAbs().maxCoeff()))
            throw precision_exhausted("spectral subspace failed invariance check");
    }
    double rho = 0;
    for (const auto& e : s.eigen) {
        if (e.cls == 2)
            continue;
        double a = abs(e.value).convert_to<double>();
        double r = std::max(a, 1.0 / a);
        rho = rho == 0 ? r : std::min(rho, r);
    }
    s.rho = rho == 0 ? 1.0 : rho;
    s.c_const = growth_constant_fit(s, fit_radius);
    return s;
}

inline Eigen::VectorXd to_eigen(const IntVec& v)
{
    Eigen::VectorXd r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        r(i) = to_double(v[i]);
    return r;
}

inline VecR to_eigen_mp(const IntVec& v)
{
    VecR r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        r(i) = Real(v[i]);
    return r;
}

inline std::vector<double> project(const SpectralSplit& s, const IntVec& v, int i)
{
    if (i < 1 || i > 3)
        throw std::invalid_argument("projection index must be 1, 2 or 3");
    Eigen::VectorXd p = s.proj[i - 1] * to_eigen(v);
    return std::vector<double>(p.data(), p.data() + p.size());
}

inline std::array<double, 3> projection_norms(const SpectralSplit& s, const Eigen::VectorXd& v)
{
    std::array<double, 3> r{};
    for (int i = 0; i < 3; ++i)
        r[i] = s.basis[i].cols() ? (s.proj[i] * v).norm() : 0.0;
    return r;
}

inline std::array<double, 3> projection_norms(const SpectralSplit& s, const IntVec& v)
{
    return projection_norms(s, to_eigen(v));
}

inline std::array<Real, 3> projection_norms_mp(const SpectralSplit& s, const IntVec& v)
{
    VecR x = to_eigen_mp(v);
    std::array<Real, 3> r{};
    for (int i = 0; i < 3; ++i)
        r[i] = s.basis_mp[i].cols() ? Real((s.proj_mp[i] * x).norm()) : Real(0);
    return r;
}

// Integer points of the Euclidean ball, or a deterministic sample when the ball is large.
inline std::vector<IntVec> integer_ball(std::size_t n, int radius, std::size_t cap = 200000, std::uint64_t seed = 1)
{
    std::vector<IntVec> out;
    double box = std::pow(2.0 * radius + 1, double(n));
    const long long r2 = 1LL * radius * radius;
    if (box <= double(cap)) {
        std::vector<int> x(n, -radius);
        while (true) {
            long long s = 0;
            bool nz = false;
            for (int c : x) {
                s += 1LL * c * c;
                nz = nz || c != 0;
            }
            if (nz && s <= r2) {
                IntVec v(n);
                for (std::size_t i = 0; i < n; ++i)
                    v[i] = x[i];
                out.push_back(std::move(v));
            }
            std::size_t k = 0;
            while (k < n && x[k] == radius)
                x[k++] = -radius;
            if (k == n)
                break;
            ++x[k];
        }
        return out;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(-radius, radius);
    const std::size_t want = std::min<std::size_t>(cap / 10, 20000);
    while (out.size() < want) {
        std::vector<int> x(n);
        long long s = 0;
        for (auto& c : x) {
            c = d(rng);
            s += 1LL * c * c;
        }
        if (s == 0 || s > r2)
            continue;
        IntVec v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = x[i];
        out.push_back(std::move(v));
    }
    return out;
}

// Largest C for which the three growth inequalities hold on the sampled ball and |i| <= radius.
inline double growth_constant_fit(const SpectralSplit& s, int sample_radius)
{
    const std::size_t n = s.dim();
    double C = 1.0;
    if (sample_radius <= 0)
        return C;
    std::vector<Eigen::MatrixXd> pw;
    for (int i = -sample_radius; i <= sample_radius; ++i)
        pw.push_back(detail::to_double(s.matrix.pow(i).square()));
    auto pts = integer_ball(n, sample_radius, 60000);
    for (const auto& v : pts) {
        Eigen::VectorXd x = to_eigen(v);
        for (int c = 0; c < 3; ++c) {
            if (s.basis[c].cols() == 0)
                continue;
            Eigen::VectorXd w = s.proj[c] * x;
            double wn = w.norm();
            if (wn < 1e-300)
                continue;
            for (int i = -sample_radius; i <= sample_radius; ++i) {
                double fw = (pw[i + sample_radius] * w).norm() / wn;
                if (c == 0 && i >= 0)
                    C = std::min(C, fw / std::pow(s.rho, i));
                else if (c == 2 && i <= 0)
                    C = std::min(C, fw / std::pow(s.rho, -i));
                else if (c == 1 && i != 0)
                    C = std::min(C, fw * std::pow(double(std::abs(i)), double(n)));
            }
        }
    }
    return C;
}

// ----- Lyapunov data for commuting generator sets -----

struct LyapunovRow {
    Eigen::MatrixXd basis;          // orthonormal columns
    std::vector<double> exponents;  // one per generator
    std::vector<double> spread;     // max - min of log|eig| of the restriction
};

struct LyapunovTable {
    std::vector<int> word;          // exponents of the generic word
    std::vector<LyapunovRow> rows;
};

inline IntMatrix word_power(const std::vector<IntMatrix>& gens, const std::vector<int>& k)
{
    IntMatrix w = IntMatrix::identity(gens[0].dim());
    for (std::size_t i = 0; i < gens.size(); ++i)
        w = w * gens[i].pow(k[i]);
    return w;
}

inline LyapunovTable lyapunov_table(const std::vector<IntMatrix>& gens)
{
    if (gens.empty())
        throw std::invalid_argument("lyapunov_table needs generators");
    // generic word: most modulus clusters among small exponent patterns
    std::vector<std::vector<int>> candidates;
    const int g = int(gens.size());
    std::vector<int> primes{1, 2, 3, 5, 7, 11, 13};
    for (int shift = 0; shift < 4; ++shift) {
        std::vector<int> k(g);
        for (int i = 0; i < g; ++i)
            k[i] = primes[(i + shift) % primes.size()] * ((i + shift) % 2 ? -1 : 1);
        candidates.push_back(k);
    }
    LyapunovTable best;
    std::size_t best_rows = 0;
    for (const auto& k : candidates) {
        IntMatrix w = word_power(gens, k);
        auto eig = detail::classified_eigenvalues(char_poly(w));
        // cluster by log-modulus
        std::vector<std::vector<EigenInfo>> clusters;
        std::vector<double> keys;
        for (const auto& e : eig) {
            double lm = std::log(abs(e.value).convert_to<double>());
            bool placed = false;
            for (std::size_t c = 0; c < keys.size(); ++c)
                if (std::abs(keys[c] - lm) < 1e-9 * (1 + std::abs(lm))) {
                    clusters[c].push_back(e);
                    placed = true;
                    break;
                }
            if (!placed) {
                keys.push_back(lm);
                clusters.push_back({e});
            }
        }
        if (clusters.size() <= best_rows)
            continue;
        LyapunovTable t;
        t.word = k;
        const MatR W = detail::to_mp(w.square());
        for (const auto& cl : clusters) {
            LyapunovRow row;
            row.basis = detail::to_double(detail::generalized_eigenspace(W, cl));
            for (const auto& gm : gens) {
                Eigen::MatrixXd G = detail::to_double(gm.square());
                Eigen::MatrixXd M = row.basis.transpose() * G * row.basis;
                Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
                double lo = 1e300, hi = -1e300, sum = 0;
                for (Eigen::Index i = 0; i < M.rows(); ++i) {
                    double l = std::log(std::abs(es.eigenvalues()(i)));
                    lo = std::min(lo, l);
                    hi = std::max(hi, l);
                    sum += l;
                }
                row.exponents.push_back(sum / double(M.rows()));
                row.spread.push_back(hi - lo);
            }
            t.rows.push_back(std::move(row));
        }
        best_rows = clusters.size();
        best = std::move(t);
    }
    return best;
}

struct GrowthRate {
    bool ok = false;
    double f_min = 0;              // min over the unit circle of max_i chi_i(t)
    double tau = 0;                // f_min / 2
    std::array<double, 2> t0{};    // minimizing direction
    std::string certificate;       // set on failure
    LyapunovTable table;
};

inline GrowthRate pair_growth_rate(const IntMatrix& a, const IntMatrix& b, double tol = 1e-9)
{
    GrowthRate r;
    r.table = lyapunov_table({a, b});
    auto f = [&](double th) {
        double t1 = std::cos(th), t2 = std::sin(th);
        double m = -1e300;
        for (const auto& row : r.table.rows)
            m = std::max(m, t1 * row.exponents[0] + t2 * row.exponents[1]);
        return m;
    };
    const int grid = 4096;
    const double two_pi = 2 * M_PI;
    int kbest = 0;
    double fbest = 1e300;
    for (int k = 0; k < grid; ++k) {
        double v = f(two_pi * k / grid);
        if (v < fbest) {
            fbest = v;
            kbest = k;
        }
    }
    double lo = two_pi * (kbest - 1) / grid, hi = two_pi * (kbest + 1) / grid;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 100; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    double th = 0.5 * (lo + hi);
    double fm = std::min(f(th), fbest);
    if (fm == fbest)
        th = two_pi * kbest / grid;
    r.f_min = fm;
    r.t0 = {std::cos(th), std::sin(th)};
    if (fm <= tol) {
        r.ok = false;
        r.tau = 0;
        r.certificate = "all exponents vanish along direction (" + std::to_string(r.t0[0]) + ", " +
                        std::to_string(r.t0[1]) + ")";
    } else {
        r.ok = true;
        r.tau = fm / 2;
    }
    return r;
}

} // namespace torikam

#endif
