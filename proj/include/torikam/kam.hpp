#ifndef TORIKAM_KAM_HPP
#define TORIKAM_KAM_HPP

#include "action.hpp"
#include "cohomology.hpp"
#include "grid.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace torikam {

struct KamConfig {
    double trunc_radius = 8;
    std::size_t grid_size = 32;
    double gate = 0; // C^1 proxy threshold; 0 selects 1e-2 / ||A||
    double target = 1e-10;
    int max_iters = 8;
    double inversion_tol = 1e-15;
    std::optional<int> l_override;
    ComposeOptions compose;
};

struct RegisteredElement {
    std::string name;
    IntMatrix matrix;
    FourierMapD r;
};

struct PerturbedAction {
    ActionSpec base;
    std::map<std::string, FourierMapD> perturbations;
    std::vector<RegisteredElement> extras; // words other than generators, e.g. commutators
    double trunc_radius = 8;
    std::size_t grid_size = 32;

    const FourierMapD& R(const std::string& name) const
    {
        auto it = perturbations.find(name);
        if (it == perturbations.end())
            throw std::invalid_argument("missing generator: " + name);
        return it->second;
    }

    // perturbation registered for a matrix (generator or extra); nullptr when none
    const FourierMapD* find(const IntMatrix& m) const
    {
        for (const auto& [name, g] : base.generators)
            if (g == m) {
                auto it = perturbations.find(name);
                return it == perturbations.end() ? nullptr : &it->second;
            }
        for (const auto& e : extras)
            if (e.matrix == m)
                return &e.r;
        return nullptr;
    }

    void validate() const
    {
        for (const auto& [name, g] : base.generators) {
            const auto& r = R(name);
            if (r.dim_in() != base.dim || r.dim_out() != base.dim)
                throw std::invalid_argument("perturbation of " + name + " has the wrong dimensions");
            if (r.support_radius() > trunc_radius + 1e-12)
                throw std::invalid_argument("perturbation of " + name + " exceeds the truncation radius");
        }
        if (double(grid_size) / 2 <= trunc_radius)
            throw std::invalid_argument("grid too small for the truncation radius");
    }

    double max_c0() const
    {
        double e = 0;
        for (const auto& kv : perturbations)
            e = std::max(e, c0_proxy(kv.second));
        return e;
    }
};

inline double operator_norm(const IntMatrix& m)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::to_double(m.square()));
    return svd.singularValues()(0);
}

inline std::string ergodic_generator(const ActionSpec& spec)
{
    for (const auto& [name, g] : spec.generators)
        if (is_ergodic(g))
            return name;
    throw std::invalid_argument("no ergodic generator");
}

struct GateCheck {
    bool pass = false;
    double c1 = 0;
    double threshold = 0;
    std::string worst;
};

inline GateCheck smallness_gate(const PerturbedAction& pa, double threshold = 0)
{
    GateCheck g;
    g.threshold = threshold > 0 ? threshold : 1e-2 / operator_norm(pa.base.get(ergodic_generator(pa.base)));
    for (const auto& [name, r] : pa.perturbations) {
        double c = cr_proxy(r, 1);
        if (c >= g.c1) {
            g.c1 = c;
            g.worst = name;
        }
    }
    g.pass = g.c1 < g.threshold;
    return g;
}

// Omega with random coefficients on the modes +-e_i, scaled to C^0 proxy eps.
inline FourierMapD low_mode_map(std::size_t n, double eps, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1, 1);
    FourierMapD om(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        Freq v(n, 0);
        v[i] = 1;
        CVec<double> c(n);
        for (auto& x : c)
            x = Cx<double>(u(rng), u(rng));
        om.set(v, c);
    }
    double c0 = c0_proxy(om);
    return c0 > 0 ? (eps / c0) * om : om;
}

// R of the composition of two perturbed maps: a(b x + R_b) + R_a(b x + R_b) - a b x
inline Composition perturbed_product(const IntMatrix& a, const FourierMapD& ra, const IntMatrix& b,
                                     const FourierMapD& rb, std::size_t grid, double radius,
                                     const ComposeOptions& opt = {})
{
    auto c = compose_affine(ra, b, evaluate(rb, grid), radius, opt);
    c.map += apply_matrix(a, rb);
    return c;
}

struct ConjugatedAction {
    PerturbedAction pa;
    FourierMapD omega0; // H0 = I + omega0
    FourierMapD psi0;   // H0^{-1} = I + psi0
    double discarded = 0;
};

// (I + omega0)^{-1} o g o (I + omega0) - g for every generator and every extra word.
inline ConjugatedAction conjugated_action(const ActionSpec& base, const FourierMapD& omega0, double radius,
                                          std::size_t grid,
                                          const std::vector<std::pair<std::string, IntMatrix>>& extra_words = {},
                                          const ComposeOptions& opt = {})
{
    ConjugatedAction ca;
    ca.omega0 = omega0;
    ca.pa.base = base;
    ca.pa.trunc_radius = radius;
    ca.pa.grid_size = grid;
    auto inv = invert_near_identity(omega0, grid, radius, 1e-16, 80, opt);
    ca.psi0 = inv.psi;
    double disc = inv.discarded * inv.discarded;
    auto build = [&](const IntMatrix& g) {
        FourierMapD go = apply_matrix(g, omega0);
        auto c = compose_affine(inv.psi, g, evaluate(go, grid), radius, opt);
        disc += c.discarded * c.discarded;
        FourierMapD r = go + c.map;
        double t = truncate(r, radius);
        disc += t * t;
        return r;
    };
    for (const auto& [name, g] : base.generators)
        ca.pa.perturbations[name] = build(g);
    for (const auto& [name, g] : extra_words)
        ca.pa.extras.push_back({name, g, build(g)});
    ca.discarded = std::sqrt(disc);
    return ca;
}

// L(x,y) = R_x o y + x R_y - R_y o (xz) - y R_x o z - (yx) R_z with z = x^-1 y^-1 x y
template <class T>
FourierMap<T> cocycle_difference(const IntMatrix& x, const FourierMap<T>& rx, const IntMatrix& y,
                                 const FourierMap<T>& ry, const FourierMap<T>* rz)
{
    const IntMatrix z = commutator(x, y);
    FourierMap<T> l = compose_auto(rx, y) + apply_matrix(x, ry) - compose_auto(ry, x * z) -
                      apply_matrix(y, compose_auto(rx, z));
    if (!z.is_identity()) {
        if (!rz)
            throw std::invalid_argument("cocycle_difference: no perturbation registered for the commutator");
        l -= apply_matrix(y * x, *rz);
    }
    l.prune();
    return l;
}

inline FourierMapD cocycle_difference(const PerturbedAction& pa, const std::string& x, const std::string& y)
{
    const IntMatrix& xm = pa.base.get(x);
    const IntMatrix& ym = pa.base.get(y);
    const IntMatrix z = commutator(xm, ym);
    const FourierMapD* rz = z.is_identity() ? nullptr : pa.find(z);
    if (!z.is_identity() && !rz)
        throw std::invalid_argument("missing generator: commutator of " + x + " and " + y);
    return cocycle_difference(xm, pa.R(x), ym, pa.R(y), rz);
}

// generator pairs whose commutator is trivial or registered
inline std::vector<std::pair<std::string, std::string>> measurable_pairs(const PerturbedAction& pa)
{
    std::vector<std::pair<std::string, std::string>> out;
    const auto& gs = pa.base.generators;
    for (std::size_t i = 0; i < gs.size(); ++i)
        for (std::size_t j = i + 1; j < gs.size(); ++j) {
            IntMatrix z = commutator(gs[i].second, gs[j].second);
            if (z.is_identity() || pa.find(z))
                out.emplace_back(gs[i].first, gs[j].first);
        }
    return out;
}

struct SmallnessRow {
    double t = 0;
    double r_norm = 0; // max C^0 proxy of the perturbations
    double l_norm = 0; // max C^0 proxy of L over measurable pairs
};

struct SmallnessTable {
    std::vector<SmallnessRow> rows;
    std::optional<double> slope; // log-log slope of l_norm against t
    std::string verdict;
};

inline std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0 && y[i] > 0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    if (lx.size() < 2)
        return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= double(lx.size());
    my /= double(ly.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0)
        return std::nullopt;
    return sxy / sxx;
}

inline SmallnessTable quadratic_smallness_check(const std::function<PerturbedAction(double)>& family,
                                                const std::vector<double>& scales)
{
    SmallnessTable tab;
    std::vector<double> ts, ls;
    for (double t : scales) {
        PerturbedAction pa = family(t);
        SmallnessRow row;
        row.t = t;
        row.r_norm = pa.max_c0();
        for (const auto& [x, y] : measurable_pairs(pa))
            row.l_norm = std::max(row.l_norm, c0_proxy(cocycle_difference(pa, x, y)));
        tab.rows.push_back(row);
        ts.push_back(t);
        ls.push_back(row.l_norm);
    }
    bool all_zero = true;
    for (double l : ls)
        all_zero = all_zero && l == 0;
    if (all_zero) {
        tab.verdict = "identically small";
        return tab;
    }
    tab.slope = loglog_slope(ts, ls);
    tab.verdict = tab.slope ? "slope " + std::to_string(*tab.slope) : "slope undefined";
    return tab;
}

template <class T>
struct EProjection {
    FourierMap<T> rr;    // supported on minimal points
    FourierMap<T> omega; // twisted_diff(omega, a) = r - rr
    std::size_t orbits = 0;
    double residual = 0;
};

// rr_u = A sum_j A^{-(j+1)} r_{A*^j u} at each minimal point u; omega solves the rest.
template <class T>
EProjection<T> project_to_e_set(const FourierMap<T>& r, const TwistedPair& tp)
{
    if (!(tp.p == tp.q))
        throw std::invalid_argument("project_to_e_set: twist and base must agree");
    EProjection<T> e;
    auto rep = obstruction(r, tp);
    e.rr = FourierMap<T>(r.dim_in(), r.dim_out());
    ScalarMatrix<T> a(tp.p);
    for (const auto& o : rep.orbits) {
        if (-o.rep < o.rep)
            continue; // set() writes the mirror orbit
        e.rr.set(o.rep, a * o.value);
    }
    e.rr.prune();
    e.orbits = rep.orbits.size();
    double tol = 0;
    if constexpr (std::is_same_v<T, double>)
        tol = 1e-12 * (1 + max_coeff(r));
    auto s = solve_twisted(r - e.rr, tp, tol);
    if (!s.ok)
        throw std::logic_error("project_to_e_set: solver failed after projection: " + s.reason);
    e.omega = std::move(s.omega);
    e.residual = s.residual;
    return e;
}

template <class T>
EProjection<T> project_to_e_set(const FourierMap<T>& r, const IntMatrix& a)
{
    return project_to_e_set(r, TwistedPair(a, a));
}

struct RouterStats {
    std::size_t frequencies = 0;
    double min_ratio = std::numeric_limits<double>::infinity(); // min_v max_i |(A_i* - I) v| / |v|
    std::map<std::string, std::size_t> routed;                  // frequencies per chosen unipotent
    double weighted_sum_max = 0;                                 // max |S_K| of L along the chosen unipotent
};

struct SplitResult {
    std::string kind;
    std::string ergodic;
    int l = 1;
    FourierMapD omega;
    std::map<std::string, FourierMapD> remainders;
    std::map<std::string, double> input_norms;     // C^0 proxies
    std::map<std::string, double> remainder_norms; // C^0 proxies
    std::map<std::string, double> l_norms;         // C^0 proxy of L per measurable pair
    double omega_norm = 0;
    bool reconstruction_exact = false;
    std::optional<RouterStats> router;
    std::vector<std::string> notes;
};

// Exact pieces of a splitting over Q.
struct RationalSplit {
    FourierMapQ omega;
    std::map<std::string, FourierMapQ> remainders;
    bool reconstruction_exact = false;
};

// Omega from the E-set projection of R_{g1}; remainders R_d - (d Omega - Omega o d) for the rest.
inline RationalSplit split_exact(const ActionSpec& spec, const std::map<std::string, FourierMapQ>& r,
                                 const std::string& g1)
{
    RationalSplit s;
    const IntMatrix& a = spec.get(g1);
    auto proj = project_to_e_set(r.at(g1), a);
    s.omega = proj.omega;
    s.reconstruction_exact = true;
    for (const auto& [name, g] : spec.generators) {
        FourierMapQ rem = name == g1 ? proj.rr : r.at(name) - twisted_diff(s.omega, g);
        rem.prune();
        FourierMapQ back = twisted_diff(s.omega, g) + rem;
        back.prune();
        s.reconstruction_exact = s.reconstruction_exact && back == r.at(name);
        s.remainders[name] = std::move(rem);
    }
    return s;
}

// l for the rescaled ergodic generator: 1 when every generator commutes with it, else the displacement threshold.
inline int choose_rescaling(const ActionSpec& spec, const std::string& g1, long long n_max = 50)
{
    const IntMatrix& a = spec.get(g1);
    std::vector<IntMatrix> xs;
    for (const auto& [name, g] : spec.generators)
        if (name != g1 && !(a * g == g * a)) {
            xs.push_back(g.dual());
            xs.push_back(g.inverse().dual());
        }
    if (xs.empty())
        return 1;
    auto found = displacement_threshold(split(a.dual()), xs, integer_ball(spec.dim, 30, 2000), {1, 2}, n_max);
    if (!found.n)
        throw std::runtime_error("choose_rescaling: no displacement threshold up to " + std::to_string(n_max));
    return int(*found.n);
}

namespace detail {

inline SplitResult split_common(const PerturbedAction& pa, const std::string& g1, int l, std::string kind)
{
    SplitResult out;
    out.kind = std::move(kind);
    out.ergodic = g1;
    out.l = l;
    std::map<std::string, FourierMapQ> rq;
    for (const auto& [name, g] : pa.base.generators)
        rq[name] = to_rational(pa.R(name));
    ActionSpec spec = pa.base;
    std::string anchor = g1;
    if (l > 1) {
        // perturbation of A^l, composed on the grid
        const IntMatrix& a = pa.base.get(g1);
        FourierMapD r = pa.R(g1);
        IntMatrix al = a;
        for (int i = 1; i < l; ++i) {
            r = perturbed_product(a, pa.R(g1), al, r, pa.grid_size, pa.trunc_radius).map;
            al = a * al;
        }
        anchor = g1 + "^" + std::to_string(l);
        std::vector<std::pair<std::string, IntMatrix>> gens = spec.generators;
        gens.emplace_back(anchor, al);
        spec = ActionSpec(gens);
        rq[anchor] = to_rational(r);
        out.notes.push_back("ergodic generator rescaled to " + anchor);
    }
    auto s = split_exact(spec, rq, anchor);
    out.omega = to_double(s.omega);
    out.omega_norm = c0_proxy(out.omega);
    out.reconstruction_exact = s.reconstruction_exact;
    for (const auto& [name, g] : pa.base.generators) {
        out.remainders[name] = to_double(s.remainders.at(name));
        out.input_norms[name] = c0_proxy(pa.R(name));
        out.remainder_norms[name] = c0_proxy(out.remainders[name]);
    }
    for (const auto& [x, y] : measurable_pairs(pa))
        out.l_norms[x + "," + y] = c0_proxy(cocycle_difference(pa, x, y));
    return out;
}

} // namespace detail

// Theorem-2 shape: A1 ergodic, A_i unipotent with (A_i - I)^2 = 0 commuting with A1, common fixed space {0}.
inline std::optional<std::string> abelian_unipotent_violation(const ActionSpec& spec, const std::string& g1)
{
    const IntMatrix& a = spec.get(g1);
    if (!is_ergodic(a))
        return g1 + " is not ergodic";
    std::vector<SquareIntMatrix> ks;
    for (const auto& [name, g] : spec.generators) {
        if (name == g1)
            continue;
        SquareIntMatrix nil = g.square() - SquareIntMatrix::identity(spec.dim);
        if (!(nil * nil).is_zero())
            return name + ": (A - I)^2 != 0";
        if (!(a * g == g * a))
            return name + " does not commute with " + g1;
        ks.push_back(nil);
    }
    if (ks.empty())
        return "no unipotent generators";
    if (common_kernel_dim(ks) != 0)
        return "common fixed space of the unipotents is nonzero";
    return std::nullopt;
}

inline SplitResult split_abelian_unipotent(const PerturbedAction& pa, std::optional<int> l_override = {},
                                           std::size_t sample = 64)
{
    const std::string g1 = ergodic_generator(pa.base);
    if (auto v = abelian_unipotent_violation(pa.base, g1))
        throw std::invalid_argument("split_abelian_unipotent: " + *v);
    const int l = l_override ? *l_override : choose_rescaling(pa.base, g1);
    auto out = detail::split_common(pa, g1, l, "abelian-unipotent");
    RouterStats rs;
    const IntMatrix& a = pa.base.get(g1);
    std::map<std::string, FourierMapD> ls;
    for (const auto& [name, g] : pa.base.generators)
        if (name != g1)
            ls[name] = cocycle_difference(pa, g1, name);
    const double rho = split(a.dual(), 30, 0).rho;
    std::size_t k = 0;
    for (const auto& [v, c] : out.remainders.at(g1).coeffs()) {
        const IntVec vi = to_intvec(v);
        std::string best;
        double bn = -1;
        for (const auto& [name, g] : pa.base.generators) {
            if (name == g1)
                continue;
            IntVec d = g.dual().apply(vi);
            double s = 0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                double x = to_double(BigInt(d[i] - vi[i]));
                s += x * x;
            }
            if (std::sqrt(s) > bn) {
                bn = std::sqrt(s);
                best = name;
            }
        }
        if (bn <= 0)
            throw std::logic_error("router found no unipotent moving a frequency");
        ++rs.frequencies;
        ++rs.routed[best];
        rs.min_ratio = std::min(rs.min_ratio, bn / euclid_norm(v));
        if (k++ < sample) {
            auto ws = weighted_sum_unipotent(ls.at(best), v, a, pa.base.get(best), k_box(2), rho, 0.0);
            rs.weighted_sum_max = std::max(rs.weighted_sum_max, cvec_norm(ws.value));
        }
    }
    out.router = rs;
    return out;
}

inline SplitResult split_nilpotent(const PerturbedAction& pa, std::optional<int> l_override = {})
{
    auto lcs = lower_central_series(pa.base);
    if (!lcs.nilpotent)
        throw std::invalid_argument("split_nilpotent: " + lcs.verdict);
    const std::string g1 = ergodic_generator(pa.base);
    const int l = l_override ? *l_override : choose_rescaling(pa.base, g1);
    auto out = detail::split_common(pa, g1, l, "nilpotent");
    out.notes.push_back(lcs.verdict);
    return out;
}

inline SplitResult split_action(const PerturbedAction& pa, std::optional<int> l_override = {})
{
    const std::string g1 = ergodic_generator(pa.base);
    if (!abelian_unipotent_violation(pa.base, g1))
        return split_abelian_unipotent(pa, l_override);
    if (lower_central_series(pa.base).nilpotent)
        return split_nilpotent(pa, l_override);
    throw std::invalid_argument("split_action: base is neither abelian-unipotent nor nilpotent");
}

struct GeneratorError {
    double c0 = 0;
    double c1 = 0;
    double discarded = 0;
    std::array<double, 3> ladder{}; // ||R||_a for a = 0, 1, 2
    double error() const { return c0 + discarded; }
};

struct KamReport {
    int iteration = 0;
    std::map<std::string, GeneratorError> errors;
    double error = 0; // max over generators of C^0 proxy + discarded
    std::map<std::string, double> l_norms;
    double discarded = 0;
    double seconds = 0;
    int l = 1;
    std::string split_kind;
    double omega_norm = 0;
    int inversion_iterations = 0;
    double inversion_residual = 0;
    std::map<std::string, double> remainder_norms;
    bool reconstruction_exact = true;
};

inline KamReport measure(const PerturbedAction& pa, const std::map<std::string, double>& discarded = {})
{
    KamReport rep;
    for (const auto& [name, r] : pa.perturbations) {
        GeneratorError e;
        e.c0 = c0_proxy(r);
        e.c1 = cr_proxy(r, 1);
        auto it = discarded.find(name);
        e.discarded = it == discarded.end() ? 0 : it->second;
        for (int a = 0; a < 3; ++a)
            e.ladder[std::size_t(a)] = norm_a(r, a);
        rep.errors[name] = e;
        rep.error = std::max(rep.error, e.error());
        rep.discarded = std::max(rep.discarded, e.discarded);
    }
    for (const auto& [x, y] : measurable_pairs(pa))
        rep.l_norms[x + "," + y] = c0_proxy(cocycle_difference(pa, x, y));
    return rep;
}

struct StepResult {
    bool refused = false;
    std::string reason;
    PerturbedAction next;
    KamReport report;
    FourierMapD omega_h; // H = I + omega_h
};

inline StepResult kam_step(const PerturbedAction& pa, const KamConfig& cfg, int iteration = 1)
{
    auto t0 = std::chrono::steady_clock::now();
    pa.validate();
    StepResult st;
    auto gate = smallness_gate(pa, cfg.gate);
    if (!gate.pass) {
        st.refused = true;
        st.reason = "smallness gate: C^1 proxy " + std::to_string(gate.c1) + " of " + gate.worst +
                    " is not below " + std::to_string(gate.threshold);
        st.next = pa;
        return st;
    }
    auto sp = split_action(pa, cfg.l_override);
    st.omega_h = -1.0 * sp.omega;
    const std::size_t M = pa.grid_size;
    const double rad = pa.trunc_radius;
    auto inv = invert_near_identity(st.omega_h, M, rad, cfg.inversion_tol, 80, cfg.compose);
    const GridField om = evaluate(st.omega_h, M);
    st.next.base = pa.base;
    st.next.trunc_radius = rad;
    st.next.grid_size = M;
    std::map<std::string, double> disc;
    for (const auto& [name, g] : pa.base.generators) {
        auto c1 = compose_shift(pa.R(name), om, rad, cfg.compose);
        FourierMapD w = apply_matrix(g, st.omega_h) + c1.map;
        auto c2 = compose_affine(inv.psi, g, evaluate(w, M), rad, cfg.compose);
        FourierMapD rn = w + c2.map;
        double t = truncate(rn, rad);
        disc[name] = std::sqrt(c1.discarded * c1.discarded + c2.discarded * c2.discarded + t * t +
                               inv.discarded * inv.discarded);
        st.next.perturbations[name] = std::move(rn);
    }
    st.report = measure(st.next, disc);
    st.report.iteration = iteration;
    st.report.l = sp.l;
    st.report.split_kind = sp.kind;
    st.report.omega_norm = sp.omega_norm;
    st.report.inversion_iterations = inv.iterations;
    st.report.inversion_residual = inv.residual;
    st.report.remainder_norms = sp.remainder_norms;
    st.report.reconstruction_exact = sp.reconstruction_exact;
    st.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return st;
}

// true when the error grew in each of the last two steps
inline bool diverging(const std::vector<double>& errors)
{
    const std::size_t n = errors.size();
    return n >= 3 && errors[n - 1] > errors[n - 2] && errors[n - 2] > errors[n - 3];
}

struct KamRun {
    std::vector<KamReport> reports; // reports[0] measures the input
    std::string status;             // converged | max-iters | diverged | refused | step-failed
    std::string diagnostics;
    FourierMapD conjugacy; // H_total = I + conjugacy
    PerturbedAction final_action;
    double conjugacy_discarded = 0;

    std::vector<double> errors() const
    {
        std::vector<double> e;
        for (const auto& r : reports)
            e.push_back(r.error);
        return e;
    }
};

inline KamRun kam_run(const PerturbedAction& pa, const KamConfig& cfg,
                      const std::function<void(const KamReport&)>& on_report = {})
{
    KamRun run;
    run.final_action = pa;
    run.conjugacy = FourierMapD(pa.base.dim, pa.base.dim);
    run.reports.push_back(measure(pa));
    if (on_report)
        on_report(run.reports.back());
    if (run.reports.back().error <= cfg.target) {
        run.status = "converged";
        return run;
    }
    for (int it = 1; it <= cfg.max_iters; ++it) {
        StepResult st;
        try {
            st = kam_step(run.final_action, cfg, it);
        } catch (const std::exception& e) {
            run.status = "step-failed";
            run.diagnostics = "iteration " + std::to_string(it) + ": " + e.what();
            return run;
        }
        if (st.refused) {
            run.status = "refused";
            run.diagnostics = st.reason;
            return run;
        }
        // H_total o H = I + omega_h + Omega_total o (I + omega_h)
        auto c = compose_shift(run.conjugacy, evaluate(st.omega_h, pa.grid_size), pa.trunc_radius, cfg.compose);
        run.conjugacy = st.omega_h + c.map;
        run.conjugacy_discarded = std::hypot(run.conjugacy_discarded, c.discarded);
        run.final_action = std::move(st.next);
        run.reports.push_back(st.report);
        if (on_report)
            on_report(run.reports.back());
        if (st.report.error <= cfg.target) {
            run.status = "converged";
            return run;
        }
        if (diverging(run.errors())) {
            run.status = "diverged";
            run.diagnostics = "error grew in two consecutive steps: " + std::to_string(run.errors()[it - 2]) +
                              " -> " + std::to_string(run.errors()[it - 1]) + " -> " +
                              std::to_string(run.errors()[it]);
            return run;
        }
    }
    run.status = "max-iters";
    return run;
}

struct PropagationRow {
    std::string generator;
    double residual = 0; // grid sup of alpha~(g) o H - H o g
    bool solved = false;
};

struct PropagationReport {
    std::vector<PropagationRow> rows;
    double solved_residual = 0;
    double worst_other = 0;
    bool precondition = false; // solved residual within tol
};

// g H + R_g o H - H o g with H = I + omega, sampled on the grid
inline double conjugacy_residual(const IntMatrix& g, const FourierMapD& rg, const FourierMapD& omega,
                                 std::size_t grid, const ComposeOptions& opt = {})
{
    auto c = compose_shift(rg, evaluate(omega, grid), std::numeric_limits<double>::infinity(), opt);
    FourierMapD res = apply_matrix(g, omega) + c.map - compose_auto(omega, g);
    truncate_to_grid(res, grid);
    return evaluate(res, grid).sup();
}

inline PropagationReport propagate_conjugacy(const PerturbedAction& pa, const FourierMapD& omega,
                                             const std::string& g_solved, double tol,
                                             const ComposeOptions& opt = {})
{
    PropagationReport rep;
    for (const auto& [name, g] : pa.base.generators) {
        PropagationRow row;
        row.generator = name;
        row.solved = name == g_solved;
        row.residual = conjugacy_residual(g, pa.R(name), omega, pa.grid_size, opt);
        if (row.solved)
            rep.solved_residual = row.residual;
        else
            rep.worst_other = std::max(rep.worst_other, row.residual);
        rep.rows.push_back(row);
    }
    rep.precondition = rep.solved_residual <= tol;
    return rep;
}

// |B O(v) - O(B* v)| over sampled minimal points, against ||L(A, B)||_0.
struct ObstructionComparison {
    std::size_t samples = 0;
    double max_gap = 0;
    double l_norm = 0;
    double fitted_c = 0; // max_gap / l_norm
};

inline ObstructionComparison obstruction_comparison(const PerturbedAction& pa, const std::string& a_name,
                                                    const std::string& b_name, std::size_t max_samples = 200)
{
    ObstructionComparison oc;
    const IntMatrix& a = pa.base.get(a_name);
    const IntMatrix& b = pa.base.get(b_name);
    TwistedPair tp(a, a);
    auto rep = obstruction(pa.R(a_name), tp);
    std::map<Freq, const OrbitEntry<double>*> by_rep;
    for (const auto& o : rep.orbits)
        by_rep[o.rep] = &o;
    PowerCache<double> pw(a);
    auto value_at = [&](const Freq& v) {
        auto [j, m] = minimal_point(v, tp.qd);
        auto it = by_rep.find(m);
        if (it == by_rep.end())
            return CVec<double>(a.dim());
        return pw.get(-j) * it->second->value;
    };
    ScalarMatrix<double> bm(b);
    const IntMatrix bd = b.dual();
    for (const auto& o : rep.orbits) {
        if (oc.samples >= max_samples)
            break;
        CVec<double> lhs = bm * o.value;
        CVec<double> rhs = value_at(to_freq(bd.apply(to_intvec(o.rep))));
        CVec<double> d(a.dim());
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = lhs[i] - rhs[i];
        oc.max_gap = std::max(oc.max_gap, cvec_norm(d));
        ++oc.samples;
    }
    oc.l_norm = c0_proxy(cocycle_difference(pa, a_name, b_name));
    oc.fitted_c = oc.l_norm > 0 ? oc.max_gap / oc.l_norm : 0;
    return oc;
}

} // namespace torikam

#endif
