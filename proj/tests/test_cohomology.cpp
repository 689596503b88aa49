#include <torikam/cohomology.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace torikam;

namespace {

const IntMatrix cat{{2, 1}, {1, 1}};

IntMatrix t4_a()
{
    IntMatrix a3{{1, 0, 0, 0}, {0, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}};
    return block_diag({cat, cat}) * a3;
}

FourierMapQ coboundary(const FourierMapQ& omega, const IntMatrix& p, const IntMatrix& q)
{
    return apply_matrix(p, omega) - compose_auto(omega, q);
}

// sum over j in [-lo, hi] of P^-(j+1) theta_{Q*^j u}, by brute force
CVec<Rational> orbit_sum(const FourierMapQ& theta, const Freq& u, const IntMatrix& p, const IntMatrix& q,
                         int span = 40)
{
    const IntMatrix qd = q.dual();
    CVec<Rational> acc(theta.dim_out());
    for (int j = -span; j <= span; ++j) {
        IntVec w = qd.pow(j).apply(to_intvec(u));
        bool fits = true;
        for (const auto& x : w)
            fits = fits && fits_i64(x);
        if (!fits)
            continue;
        CVec<Rational> c = theta.get(to_freq(w));
        add_to(acc, ScalarMatrix<Rational>(p.pow(-(j + 1))) * c);
    }
    return acc;
}

} // namespace

TEST(DualMap, FastPathAgreesWithExact)
{
    for (const IntMatrix& f : {cat.dual(), t4_a().dual()}) {
        DualMap d(split(f, 30, 0));
        for (const auto& v : integer_ball(f.dim(), f.dim() == 2 ? 10 : 2)) {
            auto exact = minimal_point(v, d.split);
            auto fast = minimal_point(to_freq(v), d);
            EXPECT_EQ(fast.first, exact.j);
            EXPECT_EQ(to_intvec(fast.second), exact.point);
        }
    }
}

TEST(Obstruction, CoboundaryHasNone)
{
    std::mt19937_64 rng(7);
    for (const auto& [p, q] : {std::pair{cat, cat}, std::pair{cat.inverse(), cat}, std::pair{t4_a(), t4_a()}}) {
        auto omega = random_rational_map(q.dim(), p.dim(), q.dim() == 2 ? 6 : 2, 12, rng, true);
        auto theta = coboundary(omega, p, q);
        auto rep = obstruction(theta, p, q);
        EXPECT_GT(rep.orbits.size(), 0u);
        for (const auto& o : rep.orbits)
            for (const auto& c : o.value)
                EXPECT_TRUE(c.is_zero());
        EXPECT_EQ(rep.max_norm, 0.0);
    }
}

TEST(Obstruction, SingleModeIsObstructed)
{
    FourierMapQ theta(2, 2);
    CVec<Rational> c(2);
    c[0] = Cx<Rational>(Rational(1), Rational(0));
    theta.set(Freq{3, -1}, c);
    auto rep = obstruction(theta, cat, cat);
    ASSERT_EQ(rep.orbits.size(), 2u); // v and -v
    EXPECT_GT(rep.max_norm, 0.0);
    for (const auto& o : rep.orbits)
        EXPECT_EQ(o.terms, 1u);
}

TEST(Obstruction, AnchoredAtMinimalPointAndTelescopes)
{
    std::mt19937_64 rng(11);
    const IntMatrix p = cat.inverse(), q = cat;
    auto theta = random_rational_map(2, 2, 5, 7, rng, false);
    TwistedPair tp(p, q);
    auto rep = obstruction(theta, tp);
    const IntMatrix qd = q.dual();
    for (const auto& o : rep.orbits) {
        auto direct = orbit_sum(theta, o.rep, p, q);
        EXPECT_TRUE(direct == o.value);
        for (int k = -3; k <= 3; ++k) {
            Freq uk = to_freq(qd.pow(k).apply(to_intvec(o.rep)));
            auto lhs = orbit_sum(theta, uk, p, q);
            auto rhs = ScalarMatrix<Rational>(p.pow(k)) * o.value;
            EXPECT_TRUE(lhs == rhs) << "k=" << k;
        }
    }
}

TEST(SolveTwisted, RecoversExactSolution)
{
    std::mt19937_64 rng(3);
    for (const auto& [p, q] : {std::pair{cat, cat}, std::pair{cat.pow(2), cat}, std::pair{t4_a(), t4_a()}}) {
        auto omega = random_rational_map(q.dim(), p.dim(), q.dim() == 2 ? 6 : 2, 9, rng, true);
        auto theta = coboundary(omega, p, q);
        auto r = solve_twisted(theta, p, q, 0.0);
        ASSERT_TRUE(r.ok) << r.reason;
        EXPECT_EQ(r.residual, 0.0);
        EXPECT_TRUE(r.omega == omega);
    }
}

TEST(SolveTwisted, DoubleAgreesWithRational)
{
    std::mt19937_64 rng(5);
    auto omega = random_map(2, 2, 6, 1.0, rng, true);
    auto theta = twisted_diff(omega, cat);
    auto r = solve_twisted(theta, cat, cat, 1e-9);
    ASSERT_TRUE(r.ok) << r.reason;
    EXPECT_LT(r.residual, 1e-10);
    EXPECT_LT(max_coeff(r.omega - omega), 1e-9);
}

TEST(SolveTwisted, Dichotomy)
{
    std::mt19937_64 rng(13);
    auto omega = random_rational_map(2, 2, 5, 5, rng, false);
    auto theta = coboundary(omega, cat, cat);
    ASSERT_TRUE(solve_twisted(theta, cat, cat, 0.0).ok);
    CVec<Rational> bump(2);
    bump[1] = Cx<Rational>(Rational(1, 1000), Rational(0));
    theta.add(Freq{40, 17}, bump);
    auto r = solve_twisted(theta, cat, cat, 0.0);
    EXPECT_FALSE(r.ok);
    EXPECT_GT(r.report.max_norm, 0.0);
    EXPECT_TRUE(r.omega.empty());
}

TEST(SolveTwisted, MeanOutsideRange)
{
    const IntMatrix p{{1, 1}, {0, 1}};
    FourierMapQ theta(2, 2);
    CVec<Rational> c(2);
    c[0] = Cx<Rational>(Rational(3), Rational(0));
    theta.set(Freq{0, 0}, c);
    auto r = solve_twisted(theta, p, cat, 0.0);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.residual, 0.0);
    c[1] = Cx<Rational>(Rational(1), Rational(0));
    theta.set(Freq{0, 0}, c);
    auto r2 = solve_twisted(theta, p, cat, 0.0);
    EXPECT_FALSE(r2.ok);
    EXPECT_FALSE(r2.mean_solved);
}

TEST(SolveTwisted, RejectsNonErgodicBase)
{
    FourierMapQ theta(2, 2);
    EXPECT_THROW(solve_twisted(theta, cat, IntMatrix{{1, 1}, {0, 1}}, 0.0), std::invalid_argument);
}

TEST(TameFit, FiniteLossAcrossRadii)
{
    std::mt19937_64 rng(17);
    std::vector<std::pair<FourierMapD, FourierMapD>> samples;
    for (double radius : {2.0, 4.0, 8.0, 16.0})
        for (int i = 0; i < 3; ++i) {
            auto theta_src = random_map(2, 2, radius, 1.0, rng, false);
            auto theta = twisted_diff(theta_src, cat);
            auto r = solve_twisted(theta, cat, cat, 1e-8);
            ASSERT_TRUE(r.ok);
            samples.emplace_back(r.omega, theta);
        }
    auto f = fit_tame_exponent(samples, 1.0);
    EXPECT_GE(f.sigma, 0.0);
    EXPECT_LT(f.sigma, 4.0);
    EXPECT_GT(f.c, 0.0);
    for (const auto& [om, th] : samples)
        EXPECT_LE(norm_a(om, 1.0), f.c * norm_a(th, 1.0 + f.sigma) * (1 + 1e-12));
}

TEST(WeightedSum, PicksOrbitTerms)
{
    const IntMatrix f1 = cat.dual(), f2 = cat.dual().pow(2);
    FourierMapQ phi(2, 2);
    CVec<Rational> a(2), b(2);
    a[0] = Cx<Rational>(Rational(1), Rational(0));
    b[1] = Cx<Rational>(Rational(2), Rational(0));
    const Freq v{1, 2};
    phi.set(v, a);
    phi.set(to_freq(f1.apply(to_intvec(v))), b);
    auto s = weighted_sum(phi, v, cat, cat.pow(2), f1, f2, k_box(0));
    EXPECT_TRUE(s == a);
    auto s1 = weighted_sum(phi, v, cat, cat.pow(2), f1, f2, {{1, 0}});
    EXPECT_TRUE(s1 == ScalarMatrix<Rational>(cat) * b);
}

TEST(WeightedSumUnipotent, GrowthFloorAndChecks)
{
    const IntMatrix f = block_diag({cat, IntMatrix{{1}}});
    const IntMatrix q{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    FourierMapQ phi(3, 3);
    EXPECT_THROW(weighted_sum_unipotent(phi, Freq{1, 0, 0}, f, q, k_box(1)), std::invalid_argument);
    const IntMatrix u{{1, 0, 1}, {0, 1, 0}, {0, 0, 1}};
    EXPECT_THROW(weighted_sum_unipotent(phi, Freq{1, 0, 0}, f, u, k_box(1)), std::invalid_argument);

    // commuting pair on T^4: diag(cat, cat) with a unipotent in the same block structure
    const IntMatrix f4 = block_diag({cat, cat});
    const IntMatrix u4{{1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    ASSERT_TRUE(f4 * u4 == u4 * f4);
    std::mt19937_64 rng(19);
    auto phi4 = random_rational_map(4, 4, 3, 5, rng, false);
    auto s = weighted_sum_unipotent(phi4, Freq{1, 0, 0, 0}, f4, u4, k_box(3), split(f4.dual()).rho, 4.0);
    EXPECT_GT(s.terms, 0u);
    EXPECT_GT(s.growth_floor, 0.0);
}
