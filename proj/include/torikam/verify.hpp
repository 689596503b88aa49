#ifndef TORIKAM_VERIFY_HPP
#define TORIKAM_VERIFY_HPP

#include "action.hpp"
#include "dual_orbits.hpp"
#include "spectral.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace torikam {

struct VerifyRow {
    std::string label;
    bool pass = false;
    std::string detail;
};

struct GrowthCheck {
    double tau = 0;
    double c_train = 0;  // min ratio on the training box
    double c_fit = 0;    // margin * c_train, the constant the validation box is held to
    double c_full = 0;   // min ratio over everything
    std::size_t samples = 0;
    std::size_t violations = 0; // validation points below c_fit
    bool ok = false;
    std::string note;
};

namespace detail {

// m with small entries cached as int64 rows; falls back to exact arithmetic otherwise.
struct NormMat {
    const IntMatrix* m = nullptr;
    std::vector<std::int64_t> a;
    bool small = true;

    explicit NormMat(const IntMatrix& x) : m(&x), a(x.dim() * x.dim())
    {
        static const BigInt lim = BigInt(1) << 40;
        for (std::size_t i = 0; i < x.dim(); ++i)
            for (std::size_t j = 0; j < x.dim(); ++j) {
                const BigInt& e = x(i, j);
                if (e > lim || e < -lim)
                    small = false;
                else
                    a[i * x.dim() + j] = e.convert_to<std::int64_t>();
            }
    }

    double operator()(const IntVec& v, const std::vector<std::int64_t>& vs) const
    {
        const std::size_t n = m->dim();
        long double s = 0;
        if (small) {
            for (std::size_t i = 0; i < n; ++i) {
                std::int64_t acc = 0;
                for (std::size_t j = 0; j < n; ++j)
                    acc += a[i * n + j] * vs[j];
                s += static_cast<long double>(acc) * static_cast<long double>(acc);
            }
        } else {
            for (const auto& x : m->apply(v)) {
                long double d = static_cast<long double>(x.convert_to<double>());
                s += d * d;
            }
        }
        return double(std::sqrt(s));
    }
};

inline std::vector<std::int64_t> small_vec(const IntVec& v)
{
    std::vector<std::int64_t> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        r[i] = v[i].convert_to<std::int64_t>();
    return r;
}

inline double int_norm(const IntVec& v)
{
    long double s = 0;
    for (const auto& x : v) {
        long double d = static_cast<long double>(x.convert_to<double>());
        s += d * d;
    }
    return double(std::sqrt(s));
}

} // namespace detail

// Training pass fixes c_fit, full pass counts validation points below it.
template <class Visit>
void finish_growth_check(GrowthCheck& out, Visit& visit, double margin)
{
    out.c_train = std::numeric_limits<double>::infinity();
    visit(true, [&](double r, bool tr) {
        if (tr)
            out.c_train = std::min(out.c_train, r);
    });
    out.c_fit = margin * out.c_train;
    out.c_full = std::numeric_limits<double>::infinity();
    out.samples = 0;
    out.violations = 0;
    visit(false, [&](double r, bool tr) {
        ++out.samples;
        out.c_full = std::min(out.c_full, r);
        if (!tr && r < out.c_fit)
            ++out.violations;
    });
    out.ok = out.c_fit > 0 && std::isfinite(out.c_fit) && out.violations == 0;
    if (out.violations)
        out.note = std::to_string(out.violations) + " validation points below the fitted constant";
}

// |A^k1 B^k2 v| >= C exp(frac tau (|k1| + |k2|)) |v|^-power.
// C is fitted on |k|_inf <= k_train, |v| <= v_train (times margin) and then checked on the full box.
inline GrowthCheck verify_pair_growth(const IntMatrix& a, const IntMatrix& b, int k_bound, int v_radius,
                                      double frac = 0.9, double power = 3.0, int k_train = 3, int v_train = 10,
                                      double margin = 0.5)
{
    GrowthCheck out;
    auto gr = pair_growth_rate(a, b);
    if (!gr.ok) {
        out.note = "pair is not higher rank: " + gr.certificate;
        return out;
    }
    out.tau = gr.tau;
    const auto ball = integer_ball(a.dim(), v_radius);
    const IntMatrix ai = a.inverse(), bi = b.inverse();
    std::vector<double> norms;
    std::vector<std::vector<std::int64_t>> small;
    for (const auto& v : ball) {
        norms.push_back(detail::int_norm(v));
        small.push_back(detail::small_vec(v));
    }
    // visit(train_only, fn): fn(ratio, in_training_box)
    auto visit = [&](bool train_only, auto&& fn) {
        const int kb = train_only ? k_train : k_bound;
        for (int k1 = -kb; k1 <= kb; ++k1)
            for (int k2 = -kb; k2 <= kb; ++k2) {
                if (k1 == 0 && k2 == 0)
                    continue;
                IntMatrix w = (k1 >= 0 ? a.pow(k1) : ai.pow(-k1)) * (k2 >= 0 ? b.pow(k2) : bi.pow(-k2));
                const detail::NormMat wn(w);
                const double scale = std::exp(frac * gr.tau * (std::abs(k1) + std::abs(k2)));
                const bool k_in = std::max(std::abs(k1), std::abs(k2)) <= k_train;
                for (std::size_t i = 0; i < ball.size(); ++i) {
                    const double vn = norms[i];
                    if (vn > v_radius || (train_only && vn > v_train))
                        continue;
                    fn(wn(ball[i], small[i]) / (scale * std::pow(vn, -power)), k_in && vn <= v_train);
                }
            }
    };
    finish_growth_check(out, visit, margin);
    return out;
}

// |F^k1 Q^k2 v| >= C rho^|k1| |k2|^(1/2) |v|^-n1 for Qv != v, k2 != 0.
inline GrowthCheck verify_unipotent_growth(const IntMatrix& f, const IntMatrix& q, int k1_bound, int k2_bound,
                                           int v_radius, double n1 = -1, int k1_train = 3, int k2_train = 20,
                                           int v_train = 5, double margin = 0.5)
{
    GrowthCheck out;
    if (!(f * q == q * f))
        throw std::invalid_argument("verify_unipotent_growth: F and Q do not commute");
    if (!is_unipotent(q).unipotent)
        throw std::invalid_argument("verify_unipotent_growth: Q is not unipotent");
    const double n = double(f.dim());
    if (n1 < 0)
        n1 = (2 * n + 3) * n;
    const double rho = split(f).rho;
    out.tau = rho;
    std::vector<IntVec> ball;
    for (const auto& v : integer_ball(f.dim(), v_radius))
        if (!(q.apply(v) == v) && detail::int_norm(v) <= v_radius)
            ball.push_back(v);
    const IntMatrix fi = f.inverse(), qi = q.inverse();
    std::vector<double> norms;
    std::vector<std::vector<std::int64_t>> small;
    for (const auto& v : ball) {
        norms.push_back(detail::int_norm(v));
        small.push_back(detail::small_vec(v));
    }
    auto visit = [&](bool train_only, auto&& fn) {
        const int b1 = train_only ? k1_train : k1_bound, b2 = train_only ? k2_train : k2_bound;
        for (int k1 = -b1; k1 <= b1; ++k1) {
            IntMatrix fk = k1 >= 0 ? f.pow(k1) : fi.pow(-k1);
            for (int k2 = -b2; k2 <= b2; ++k2) {
                if (k2 == 0)
                    continue;
                IntMatrix w = fk * (k2 >= 0 ? q.pow(k2) : qi.pow(-k2));
                const detail::NormMat wn(w);
                const double scale = std::pow(rho, std::abs(k1)) * std::sqrt(double(std::abs(k2)));
                const bool k_in = std::abs(k1) <= k1_train && std::abs(k2) <= k2_train;
                for (std::size_t i = 0; i < ball.size(); ++i) {
                    const double vn = norms[i];
                    if (train_only && vn > v_train)
                        continue;
                    fn(wn(ball[i], small[i]) / (scale * std::pow(vn, -n1)), k_in && vn <= v_train);
                }
            }
        }
    };
    finish_growth_check(out, visit, margin);
    return out;
}

struct DisplacementCheck {
    std::optional<long long> n;
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::vector<VerifyRow> rows; // one per n tried
};

// Threshold search for the displacement property of A against the commutator partners xs (dual maps).
inline DisplacementCheck verify_displacement_suite(const IntMatrix& a_dual, const std::vector<IntMatrix>& xs_dual,
                                                   int ball_radius, long long n_max, std::vector<int> depths = {1},
                                                   std::size_t cap = 2000)
{
    DisplacementCheck out;
    const SpectralSplit s = split(a_dual);
    std::vector<IntVec> ball;
    for (auto& v : integer_ball(a_dual.dim(), ball_radius, cap))
        if (!is_zero(v))
            ball.push_back(v);
    auto ts = displacement_threshold(s, xs_dual, ball, depths, n_max);
    out.n = ts.n;
    for (const auto& r : ts.reports) {
        out.rows.push_back({"n=" + std::to_string(r.n), r.violations.empty(),
                            std::to_string(r.checked) + " checked, " + std::to_string(r.violations.size()) +
                                " violations" + (r.note.empty() ? "" : " (" + r.note + ")")});
        if (ts.n && r.n == *ts.n) {
            out.checked = r.checked;
            out.violations = r.violations.size();
        }
    }
    return out;
}

// Fixed-n displacement check, rows labeled pass/fail.
inline DisplacementCheck verify_displacement_at(const IntMatrix& a_dual, const std::vector<IntMatrix>& xs_dual,
                                                int ball_radius, long long n, std::vector<int> depths = {1},
                                                std::size_t cap = 2000)
{
    DisplacementCheck out;
    const SpectralSplit s = split(a_dual);
    std::vector<IntVec> ball;
    for (auto& v : integer_ball(a_dual.dim(), ball_radius, cap))
        if (!is_zero(v))
            ball.push_back(v);
    auto e = e_set_sample(power_split(s, n), ball);
    auto r = verify_displacement(s, xs_dual, n, e, depths);
    out.checked = r.checked;
    out.violations = r.violations.size();
    if (r.violations.empty())
        out.n = n;
    out.rows.push_back({"n=" + std::to_string(n), r.violations.empty(),
                        std::to_string(r.checked) + " checked, " + std::to_string(r.violations.size()) +
                            " violations" + (r.note.empty() ? "" : " (" + r.note + ")")});
    return out;
}

} // namespace torikam

#endif
