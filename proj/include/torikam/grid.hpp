#ifndef TORIKAM_GRID_HPP
#define TORIKAM_GRID_HPP

#include "fourier_map.hpp"

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace torikam {

// Uniform M^N grid on the torus with cached FFTW plans. Row-major, x_j = j / M.
class Grid {
public:
    Grid(std::size_t n, std::size_t m) : n_(n), m_(m)
    {
        if (n == 0 || m < 4 || (m & (m - 1)) != 0)
            throw std::invalid_argument("grid size must be a power of two >= 4");
        points_ = 1;
        for (std::size_t i = 0; i < n; ++i)
            points_ *= m;
        half_ = points_ / m * (m / 2 + 1);
        real_ = fftw_alloc_real(points_);
        spec_ = fftw_alloc_complex(half_);
        if (!real_ || !spec_)
            throw std::bad_alloc();
        std::vector<int> dims(n, int(m));
        std::lock_guard<std::mutex> lk(planner_mutex());
        c2r_ = fftw_plan_dft_c2r(int(n), dims.data(), spec_, real_, FFTW_ESTIMATE);
        r2c_ = fftw_plan_dft_r2c(int(n), dims.data(), real_, spec_, FFTW_ESTIMATE);
    }
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;
    ~Grid()
    {
        std::lock_guard<std::mutex> lk(planner_mutex());
        fftw_destroy_plan(c2r_);
        fftw_destroy_plan(r2c_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    std::size_t dim() const { return n_; }
    std::size_t size() const { return m_; }
    std::size_t points() const { return points_; }
    std::size_t half() const { return half_; }

    void clear_spectrum() { std::memset(spec_, 0, sizeof(fftw_complex) * half_); }

    // index of frequency v in the half spectrum, or npos when v_last < 0
    std::size_t spec_index(const Freq& v) const
    {
        const std::int64_t h = std::int64_t(m_ / 2);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (v[i] <= -h || v[i] >= h)
                throw std::out_of_range("frequency beyond grid Nyquist limit");
            if (i + 1 < n_) {
                idx = idx * m_ + std::size_t((v[i] + std::int64_t(m_)) % std::int64_t(m_));
            } else {
                if (v[i] < 0)
                    return npos;
                idx = idx * (m_ / 2 + 1) + std::size_t(v[i]);
            }
        }
        return idx;
    }

    Freq freq_of(std::size_t idx) const
    {
        Freq v(n_);
        const std::size_t last = m_ / 2 + 1;
        v[n_ - 1] = std::int64_t(idx % last);
        idx /= last;
        for (std::size_t i = n_ - 1; i-- > 0;) {
            std::int64_t k = std::int64_t(idx % m_);
            idx /= m_;
            v[i] = k <= std::int64_t(m_ / 2) ? k : k - std::int64_t(m_);
        }
        return v;
    }

    void put(std::size_t idx, std::complex<double> c)
    {
        spec_[idx][0] += c.real();
        spec_[idx][1] += c.imag();
    }

    std::complex<double> spec(std::size_t idx) const { return {spec_[idx][0], spec_[idx][1]}; }

    // spectrum -> grid values (unnormalized inverse transform)
    void to_real(std::vector<double>& out)
    {
        fftw_execute(c2r_);
        out.assign(real_, real_ + points_);
    }

    // grid values -> normalized coefficients in the half spectrum
    void to_spectrum(const std::vector<double>& in)
    {
        std::memcpy(real_, in.data(), sizeof(double) * points_);
        fftw_execute(r2c_);
        const double s = 1.0 / double(points_);
        for (std::size_t i = 0; i < half_; ++i) {
            spec_[i][0] *= s;
            spec_[i][1] *= s;
        }
    }

    std::vector<double> coordinate(std::size_t axis) const
    {
        std::vector<double> x(points_);
        std::size_t stride = 1;
        for (std::size_t i = axis + 1; i < n_; ++i)
            stride *= m_;
        for (std::size_t p = 0; p < points_; ++p)
            x[p] = double((p / stride) % m_) / double(m_);
        return x;
    }

    static constexpr std::size_t npos = std::size_t(-1);

private:
    static std::mutex& planner_mutex()
    {
        static std::mutex m;
        return m;
    }

    std::size_t n_, m_, points_ = 0, half_ = 0;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan c2r_ = nullptr, r2c_ = nullptr;
};

inline std::shared_ptr<Grid> get_grid(std::size_t n, std::size_t m)
{
    static std::mutex mu;
    static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<Grid>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto& g = cache[{n, m}];
    if (!g)
        g = std::make_shared<Grid>(n, m);
    return g;
}

// Values of a map T^N -> R^m on the grid, one array per output component.
struct GridField {
    std::size_t n = 0, m = 0, grid = 0;
    std::vector<std::vector<double>> comp;

    double sup() const
    {
        double s = 0;
        for (const auto& c : comp)
            for (double x : c)
                s = std::max(s, std::abs(x));
        return s;
    }
};

namespace detail {

inline std::complex<double> cplx(const Cx<double>& c) { return {c.re, c.im}; }

// loads d^alpha theta_k into the spectrum
inline void load_component(Grid& g, const FourierMapD& theta, std::size_t k, const std::vector<int>* alpha = nullptr)
{
    g.clear_spectrum();
    for (const auto& [v, c] : theta.coeffs()) {
        std::size_t idx = g.spec_index(v);
        if (idx == Grid::npos)
            continue;
        std::complex<double> z = cplx(c[k]);
        if (alpha) {
            for (std::size_t i = 0; i < v.size(); ++i)
                for (int e = 0; e < (*alpha)[i]; ++e)
                    z *= std::complex<double>(0, 2 * M_PI * double(v[i]));
        }
        g.put(idx, z);
    }
}

} // namespace detail

inline GridField evaluate(const FourierMapD& theta, std::size_t grid_size)
{
    auto g = get_grid(theta.dim_in(), grid_size);
    GridField f;
    f.n = theta.dim_in();
    f.m = theta.dim_out();
    f.grid = grid_size;
    f.comp.resize(f.m);
    for (std::size_t k = 0; k < f.m; ++k) {
        detail::load_component(*g, theta, k);
        g->to_real(f.comp[k]);
    }
    return f;
}

struct Analysis {
    FourierMapD map;
    double discarded = 0; // l2 norm of grid coefficients outside the radius
    double aliasing = 0;  // l2 norm in the outer quarter band of the grid spectrum
};

inline Analysis analyze(const GridField& f, double radius)
{
    auto g = get_grid(f.n, f.grid);
    const std::int64_t h = std::int64_t(f.grid / 2);
    const std::int64_t band = std::int64_t(3 * f.grid / 8);
    Analysis a;
    a.map = FourierMapD(f.n, f.m);
    std::map<Freq, CVec<double>> kept;
    double drop = 0, alias = 0;
    for (std::size_t k = 0; k < f.m; ++k) {
        double top = 0;
        for (double x : f.comp[k])
            top = std::max(top, std::abs(x));
        // transform round-off level; such coefficients are counted as discarded
        const double noise = 1e-15 * top;
        g->to_spectrum(f.comp[k]);
        for (std::size_t idx = 0; idx < g->half(); ++idx) {
            std::complex<double> z = g->spec(idx);
            if (z == 0.0)
                continue;
            Freq v = g->freq_of(idx);
            const bool paired = v.back() > 0 && v.back() < h;
            const double w = (paired ? 2.0 : 1.0) * std::norm(z);
            std::int64_t s = sup_norm(v);
            if (s >= band)
                alias += w;
            if (s >= h || euclid_norm(v) > radius + 1e-12 || std::abs(z) <= noise) {
                drop += w;
                continue;
            }
            auto it = kept.find(v);
            if (it == kept.end())
                it = kept.emplace(v, CVec<double>(f.m)).first;
            it->second[k] = Cx<double>(z.real(), is_zero(v) ? 0.0 : z.imag());
        }
    }
    for (const auto& [v, c] : kept) {
        if (v.back() == 0 && -v < v && kept.count(-v))
            continue; // the mirror entry of the last-axis-zero plane sets both
        a.map.set(v, c);
    }
    a.map.prune();
    a.discarded = std::sqrt(drop);
    a.aliasing = std::sqrt(alias);
    return a;
}

struct Composition {
    FourierMapD map;
    double discarded = 0;
    double aliasing = 0;
    int order = 0;           // Taylor order used, -1 for direct summation
    double taylor_bound = 0; // a priori bound on the omitted Taylor tail
    std::string method;
};

namespace detail {

inline void multi_indices(std::size_t n, int total, std::vector<int>& cur, std::size_t pos,
                          std::vector<std::vector<int>>& out)
{
    if (pos + 1 == n) {
        cur[pos] = total;
        out.push_back(cur);
        return;
    }
    for (int a = total; a >= 0; --a) {
        cur[pos] = a;
        multi_indices(n, total - a, cur, pos + 1, out);
    }
}

} // namespace detail

struct ComposeOptions {
    double tol = 1e-15;           // absolute bound on the omitted Taylor tail
    double direct_budget = 4e7;   // modes x points below which direct summation is used
    int max_order = 40;
};

// theta(x + eps(x)) for a displacement given by its grid values; truncated to `radius`.
inline Composition compose_shift(const FourierMapD& theta, const GridField& eps, double radius,
                                 const ComposeOptions& opt = {})
{
    const std::size_t n = theta.dim_in();
    if (eps.n != n || eps.m != n)
        throw std::invalid_argument("compose_shift: displacement must map T^N -> R^N");
    auto g = get_grid(n, eps.grid);
    const std::size_t P = g->points();
    Composition out;
    GridField acc;
    acc.n = n;
    acc.m = theta.dim_out();
    acc.grid = eps.grid;
    acc.comp.assign(acc.m, std::vector<double>(P, 0.0));
    if (theta.empty()) {
        out.map = FourierMapD(n, theta.dim_out());
        out.method = "empty";
        return out;
    }
    const double rad = theta.support_radius();

    if (double(theta.size()) * double(P) <= opt.direct_budget) {
        out.method = "direct";
        out.order = -1;
        std::vector<std::vector<double>> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = g->coordinate(i);
        std::vector<std::pair<Freq, CVec<double>>> half;
        for (const auto& [v, c] : theta.coeffs())
            if (is_zero(v) || v < -v)
                half.emplace_back(v, c);
        for (std::size_t p = 0; p < P; ++p) {
            for (const auto& [v, c] : half) {
                double ph = 0;
                for (std::size_t i = 0; i < n; ++i)
                    ph += double(v[i]) * (x[i][p] + eps.comp[i][p]);
                ph *= 2 * M_PI;
                const double cs = std::cos(ph), sn = std::sin(ph);
                const double w = is_zero(v) ? 1.0 : 2.0;
                for (std::size_t k = 0; k < acc.m; ++k)
                    acc.comp[k][p] += w * (c[k].re * cs - c[k].im * sn);
            }
        }
    } else {
        out.method = "taylor";
        double d = 0; // largest Euclidean length of the displacement
        for (std::size_t p = 0; p < P; ++p) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i)
                s += eps.comp[i][p] * eps.comp[i][p];
            d = std::max(d, s);
        }
        d = std::sqrt(d);
        const double bmax = 2 * M_PI * rad * d;
        std::vector<std::pair<double, double>> modes; // (2 pi |v| d, |c_v|)
        for (const auto& [v, c] : theta.coeffs())
            if (!is_zero(v))
                modes.emplace_back(2 * M_PI * euclid_norm(v) * d, cvec_norm(c));
        // sum_v |c_v| (2 pi |v| d)^k / k!
        auto tail = [&](int k) {
            double s = 0;
            for (auto [b, a] : modes) {
                double t = a;
                for (int j = 1; j <= k; ++j)
                    t *= b / double(j);
                s += t;
            }
            return s;
        };
        int K = 0;
        while (bmax / double(K + 2) > 0.5 || 2 * tail(K + 1) > opt.tol) {
            if (++K > opt.max_order)
                throw std::runtime_error("compose_shift: Taylor order exceeds limit; displacement too large");
        }
        out.order = K;
        out.taylor_bound = 2 * tail(K + 1);
        std::vector<double> w(P), buf;
        std::vector<int> cur(n);
        for (int k = 0; k <= K; ++k) {
            std::vector<std::vector<int>> alphas;
            detail::multi_indices(n, k, cur, 0, alphas);
            for (const auto& alpha : alphas) {
                std::fill(w.begin(), w.end(), 1.0);
                double fact = 1;
                for (std::size_t i = 0; i < n; ++i)
                    for (int e = 1; e <= alpha[i]; ++e) {
                        fact *= e;
                        const auto& ei = eps.comp[i];
                        for (std::size_t p = 0; p < P; ++p)
                            w[p] *= ei[p];
                    }
                for (std::size_t c = 0; c < acc.m; ++c) {
                    detail::load_component(*g, theta, c, &alpha);
                    g->to_real(buf);
                    auto& a = acc.comp[c];
                    const double inv = 1.0 / fact;
                    for (std::size_t p = 0; p < P; ++p)
                        a[p] += w[p] * buf[p] * inv;
                }
            }
        }
    }
    auto an = analyze(acc, radius);
    out.map = std::move(an.map);
    out.discarded = an.discarded;
    out.aliasing = an.aliasing;
    return out;
}

// Drops modes that do not fit a grid of size M; returns their l2 norm.
inline double truncate_to_grid(FourierMapD& theta, std::size_t grid_size)
{
    const std::int64_t h = std::int64_t(grid_size / 2);
    double drop = 0;
    std::vector<Freq> out;
    for (const auto& [v, c] : theta.coeffs())
        if (sup_norm(v) >= h) {
            out.push_back(v);
            drop += abs2_sum(c);
        }
    for (const auto& v : out)
        theta.set(v, CVec<double>(theta.dim_out()));
    return std::sqrt(drop);
}

// Grid values of M . f for an integer matrix acting on the values.
inline GridField apply_matrix(const IntMatrix& mtx, const GridField& f)
{
    GridField r = f;
    for (std::size_t i = 0; i < f.m; ++i) {
        std::fill(r.comp[i].begin(), r.comp[i].end(), 0.0);
        for (std::size_t j = 0; j < f.m; ++j) {
            double a = to_double(mtx.square()(i, j));
            if (a == 0)
                continue;
            for (std::size_t p = 0; p < r.comp[i].size(); ++p)
                r.comp[i][p] += a * f.comp[j][p];
        }
    }
    return r;
}

// theta(g x + delta(x)) = (theta o g)(x + g^{-1} delta(x))
inline Composition compose_affine(const FourierMapD& theta, const IntMatrix& g, const GridField& delta, double radius,
                                  const ComposeOptions& opt = {})
{
    FourierMapD t = compose_auto(theta, g);
    const double off = truncate_to_grid(t, delta.grid);
    auto c = compose_shift(t, apply_matrix(g.inverse(), delta), radius, opt);
    c.discarded = std::hypot(c.discarded, off);
    return c;
}

// theta o (I + inner), with the grid doubled until the truncated result is stable
inline Composition compose_nonlinear(const FourierMapD& theta, const FourierMapD& inner, std::size_t grid_size,
                                     double radius, const ComposeOptions& opt = {})
{
    if (c0_proxy(inner) >= 0.25)
        throw std::invalid_argument("compose_nonlinear: displacement too large for the grid method");
    std::size_t need = 4;
    while (double(need) / 2 <= std::max(theta.support_radius(), inner.support_radius()) ||
           double(need) / 2 <= radius)
        need *= 2;
    return compose_shift(theta, evaluate(inner, std::max(grid_size, need)), radius, opt);
}

struct Inversion {
    FourierMapD psi;
    int iterations = 0;
    double residual = 0; // sup on the grid of psi + omega o (I + psi)
    double discarded = 0;
};

// Psi with (I + Omega) o (I + Psi) = I, by Psi <- -Omega o (I + Psi).
inline Inversion invert_near_identity(const FourierMapD& omega, std::size_t grid_size, double radius, double tol,
                                      int max_iter = 60, const ComposeOptions& opt = {})
{
    const std::size_t n = omega.dim_in();
    if (omega.dim_out() != n)
        throw std::invalid_argument("invert_near_identity: Omega must map T^N -> R^N");
    double lip = 0;
    for (const auto& [v, c] : omega.coeffs())
        lip += 2 * M_PI * euclid_norm(v) * cvec_norm(c);
    if (lip >= 0.5)
        throw std::runtime_error("invert_near_identity: contraction not certified (Lipschitz bound " +
                                 std::to_string(lip) + ")");
    Inversion inv;
    inv.psi = -1.0 * omega;
    truncate(inv.psi, radius);
    for (int it = 1; it <= max_iter; ++it) {
        auto c = compose_shift(omega, evaluate(inv.psi, grid_size), radius, opt);
        FourierMapD next = -1.0 * c.map;
        double change = c0_proxy(next - inv.psi);
        inv.psi = std::move(next);
        inv.iterations = it;
        inv.discarded = c.discarded;
        if (change <= tol)
            break;
        if (it == max_iter)
            throw std::runtime_error("invert_near_identity: no convergence");
    }
    auto c = compose_shift(omega, evaluate(inv.psi, grid_size), std::numeric_limits<double>::infinity(), opt);
    GridField res = evaluate(inv.psi + c.map, grid_size);
    inv.residual = res.sup();
    return inv;
}

} // namespace torikam

#endif
