#include <torikam/grid.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace torikam;

namespace {

const IntMatrix cat{{2, 1}, {1, 1}};

CVec<double> cv(std::initializer_list<Cx<double>> xs) { return CVec<double>(xs); }

double max_diff(const FourierMapD& a, const FourierMapD& b) { return max_coeff(a - b); }

} // namespace

TEST(ComposeAuto, SingleCharacterMoves)
{
    FourierMapD th(2, 2);
    th.set({1, 0}, cv({{1.0, 2.0}, {0.5, 0.0}}));
    auto r = compose_auto(th, cat);
    // theta(Fx) has e_{F^T v}: F^T (1,0) = (2,1)
    EXPECT_EQ(r.size(), 2u);
    auto c = r.get({2, 1});
    EXPECT_EQ(c[0], Cx<double>(1.0, 2.0));
    EXPECT_EQ(r.get({-2, -1})[0], Cx<double>(1.0, -2.0));
    EXPECT_TRUE(r.is_real());
}

TEST(ComposeAuto, ConstantUnchanged)
{
    FourierMapD th(2, 2);
    th.set({0, 0}, cv({{3.0}, {-1.0}}));
    EXPECT_EQ(compose_auto(th, cat), th);
}

TEST(ComposeAuto, GridOracle)
{
    std::mt19937_64 rng(5);
    auto th = random_map(2, 2, 4, 1.0, rng, true);
    auto comp = compose_auto(th, cat);
    auto grid = evaluate(comp, 64);
    auto g = get_grid(2, 64);
    auto x0 = g->coordinate(0), x1 = g->coordinate(1);
    double worst = 0;
    for (std::size_t p = 0; p < g->points(); p += 7) {
        std::vector<double> fx{2 * x0[p] + x1[p], x0[p] + x1[p]};
        auto val = evaluate_at(th, fx);
        for (int k = 0; k < 2; ++k)
            worst = std::max(worst, std::abs(val[k] - grid.comp[k][p]));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(ComposeAuto, InverseRoundTripIsExact)
{
    std::mt19937_64 rng(6);
    IntMatrix f = block_diag({cat, IntMatrix{{1, 1}, {0, 1}}});
    auto th = random_map(4, 4, 2.5, 1.0, rng, true);
    EXPECT_EQ(compose_auto(compose_auto(th, f), f.inverse()), th);
    EXPECT_EQ(compose_auto(th, f).size(), th.size());
}

TEST(TwistedDiff, Cases)
{
    FourierMapQ zero(2, 2);
    EXPECT_TRUE(twisted_diff(zero, cat).empty());
    FourierMapQ c(2, 2);
    c.set({0, 0}, {Cx<Rational>(Rational(1, 3)), Cx<Rational>(Rational(-2))});
    auto d = twisted_diff(c, cat);
    // (F - I) c = [[1,1],[1,0]] (1/3, -2) = (-5/3, 1/3)
    EXPECT_EQ(d.size(), 1u);
    EXPECT_EQ(d.get({0, 0})[0], Cx<Rational>(Rational(-5, 3)));
    EXPECT_EQ(d.get({0, 0})[1], Cx<Rational>(Rational(1, 3)));

    std::mt19937_64 rng(9);
    auto w = random_rational_map(2, 2, 3, 7, rng, true);
    auto t = twisted_diff(w, cat);
    auto w0 = w.get({0, 0}), t0 = t.get({0, 0});
    EXPECT_EQ(t0[0], Cx<Rational>(w0[0].re + w0[1].re));
    EXPECT_EQ(t0[1], Cx<Rational>(w0[0].re));
    EXPECT_TRUE(t.is_real());
}

TEST(Norms, SingleModeAndHomogeneity)
{
    FourierMapD th(2, 1);
    th.set({3, 4}, cv({{0.6, 0.8}}));
    EXPECT_NEAR(norm_a(th, 2.0), 25.0, 1e-12);
    EXPECT_NEAR(norm_a(th, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(norm_a(-2.5 * th, 1.5), 2.5 * norm_a(th, 1.5), 1e-12);
    th.set({1, 0}, cv({{4.0, 0.0}}));
    // brute force max over the two modes
    EXPECT_NEAR(norm_a(th, 1.0), std::max(5.0 * 1.0, 1.0 * 4.0), 1e-12);
    EXPECT_NEAR(norm_a(th, 0.5), std::max(std::sqrt(5.0), 4.0), 1e-12);
}

TEST(Norms, SupNormBoundedByProxy)
{
    std::mt19937_64 rng(11);
    for (int s = 0; s < 20; ++s) {
        auto th = random_map(3, 3, 3, 1.0, rng);
        for (int r = 0; r <= 3; ++r)
            EXPECT_LE(norm_a(th, r), cr_proxy(th, r));
        EXPECT_LE(evaluate(th, 16).sup(), c0_proxy(th) * (1 + 1e-12));
    }
}

TEST(Grid, ParsevalRoundTrip)
{
    std::mt19937_64 rng(12);
    for (std::size_t n : {2u, 3u}) {
        auto th = random_map(n, n, 5, 1.0, rng, true);
        auto an = analyze(evaluate(th, 16), 1e9);
        EXPECT_LE(max_diff(an.map, th), 1e-12);
        EXPECT_LE(an.discarded, 1e-12);
        EXPECT_TRUE(an.map.is_real());
    }
}

TEST(Grid, TruncationReportsDiscardedEnergy)
{
    FourierMapD th(2, 1);
    th.set({1, 0}, cv({{1.0}}));
    th.set({5, 0}, cv({{0.0, 0.5}}));
    auto an = analyze(evaluate(th, 32), 3);
    EXPECT_EQ(an.map.size(), 2u);
    EXPECT_NEAR(an.discarded, std::sqrt(2 * 0.25), 1e-12);
    auto t = th;
    EXPECT_NEAR(truncate(t, 3), std::sqrt(2 * 0.25), 1e-15);
    EXPECT_EQ(t.size(), 2u);
}

TEST(ComposeNonlinear, ZeroDisplacement)
{
    std::mt19937_64 rng(13);
    auto th = random_map(2, 2, 6, 1.0, rng, true);
    FourierMapD zero(2, 2);
    auto r = compose_nonlinear(th, zero, 32, 8);
    EXPECT_LE(max_diff(r.map, th), 1e-12);
}

TEST(ComposeNonlinear, FirstOrderMatchesDerivative)
{
    FourierMapD th(2, 1);
    th.set({1, 2}, cv({{0.5, 0.0}}));
    FourierMapD om(2, 2);
    const double eps = 1e-5;
    om.set({1, 0}, cv({{eps, 0.0}, {0.0, eps}}));
    auto r = compose_nonlinear(th, om, 32, 12);
    // theta(x + Omega) - theta(x) ~ grad theta . Omega
    auto g = get_grid(2, 32);
    auto lhs = evaluate(r.map - th, 32);
    auto omg = evaluate(om, 32);
    auto x0 = g->coordinate(0), x1 = g->coordinate(1);
    double worst = 0, scale = 0;
    for (std::size_t p = 0; p < g->points(); ++p) {
        double ph = 2 * M_PI * (x0[p] + 2 * x1[p]);
        double d0 = -2 * M_PI * 1 * std::sin(ph), d1 = -2 * M_PI * 2 * std::sin(ph); // d/dx of cos
        double pred = d0 * omg.comp[0][p] + d1 * omg.comp[1][p];
        worst = std::max(worst, std::abs(lhs.comp[0][p] - pred));
        scale = std::max(scale, std::abs(pred));
    }
    // second-order remainder relative to the first-order term is O(|Omega|)
    EXPECT_LE(worst / scale, c0_proxy(om) * 2 * M_PI * std::sqrt(5.0));
}

TEST(ComposeNonlinear, GridDoublingIsStable)
{
    std::mt19937_64 rng(14);
    auto th = random_map(2, 2, 5, 0.1, rng);
    auto om = random_map(2, 2, 2, 1e-3, rng);
    auto a = compose_nonlinear(th, om, 32, 12);
    auto b = compose_nonlinear(th, om, 64, 12);
    EXPECT_LE(max_diff(a.map, b.map), 1e-10);
}

TEST(ComposeShift, TaylorAgreesWithDirect)
{
    std::mt19937_64 rng(15);
    auto th = random_map(3, 3, 3, 0.1, rng, true);
    auto om = random_map(3, 3, 1.8, 2e-3, rng);
    auto e = evaluate(om, 16);
    ComposeOptions direct, taylor;
    taylor.direct_budget = 0;
    auto a = compose_shift(th, e, 7, direct);
    auto b = compose_shift(th, e, 7, taylor);
    EXPECT_EQ(a.method, "direct");
    EXPECT_EQ(b.method, "taylor");
    EXPECT_GE(b.order, 1);
    EXPECT_LE(max_diff(a.map, b.map), 1e-13);
    EXPECT_TRUE(b.map.is_real());
}

TEST(Invert, ZeroAndConstant)
{
    FourierMapD zero(2, 2);
    auto z = invert_near_identity(zero, 16, 6, 1e-14);
    EXPECT_TRUE(z.psi.empty());
    FourierMapD c(2, 2);
    c.set({0, 0}, cv({{0.1}, {-0.05}}));
    auto ci = invert_near_identity(c, 16, 6, 1e-14);
    EXPECT_EQ(ci.psi, -1.0 * c);
}

TEST(Invert, RandomSmallDisplacement)
{
    std::mt19937_64 rng(16);
    auto om = random_map(2, 2, 3, 5e-4, rng);
    auto inv = invert_near_identity(om, 64, 24, 1e-14);
    EXPECT_LE(inv.residual, 1e-12);
    EXPECT_TRUE(inv.psi.is_real());
    auto big = random_map(2, 2, 3, 0.05, rng);
    EXPECT_THROW(invert_near_identity(big, 64, 24, 1e-14), std::runtime_error);
}
