#include <torikam/action.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace torikam;

namespace {

const IntMatrix cat{{2, 1}, {1, 1}};

ActionSpec t4_family()
{
    IntMatrix a1 = block_diag({cat, cat});
    IntMatrix a2{{1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    IntMatrix a3{{1, 0, 0, 0}, {0, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}};
    return ActionSpec({{"A1", a1}, {"A2", a2}, {"A3", a3}});
}

const IntMatrix heis_x{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}};
const IntMatrix heis_y{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}};

IntMatrix cubic_a() { return IntMatrix(companion(IntPolynomial{1, -3, 0, 1})); }
IntMatrix cubic_b() { return IntMatrix(companion(IntPolynomial{1, -3, 0, 1}) - SquareIntMatrix::identity(3)); }

// nilpotent action on T^9: tensor of a commuting cubic unit pair with the Heisenberg generators
ActionSpec t9_nilpotent() { return ActionSpec({{"A", kron(cubic_a(), heis_x)}, {"B", kron(cubic_b(), heis_y)}}); }

} // namespace

TEST(Commutator, CommutingPairIsTrivial)
{
    for (const auto& d : commutator_chain(cat, cat.pow(3), 4))
        EXPECT_TRUE(d.is_identity());
}

TEST(Commutator, HandComputed)
{
    IntMatrix x{{1, 1}, {0, 1}}, y{{1, 0}, {1, 1}};
    auto d = commutator_chain(x, y, 3);
    EXPECT_EQ(d[0], (IntMatrix{{3, 1}, {-1, 0}}));
    EXPECT_FALSE(d[0].is_identity());
    for (int i = 0; i + 1 < 3; ++i)
        EXPECT_EQ(d[i + 1], commutator(x, d[i]));
}

TEST(LowerCentralSeries, Abelian)
{
    auto r = lower_central_series(ActionSpec({{"a", cat}, {"b", cat.pow(2)}}));
    EXPECT_TRUE(r.nilpotent);
    EXPECT_EQ(r.length, 1);
}

TEST(LowerCentralSeries, Heisenberg)
{
    auto r = lower_central_series(ActionSpec({{"x", heis_x}, {"y", heis_y}}));
    EXPECT_TRUE(r.nilpotent);
    EXPECT_EQ(r.length, 2);
}

TEST(LowerCentralSeries, CatAndTranspose)
{
    IntMatrix h{{3, 1}, {2, 1}};
    auto r = lower_central_series(ActionSpec({{"a", h}, {"b", h.transpose()}}), 4, 1, 8);
    EXPECT_FALSE(r.nilpotent);
    auto r2 = lower_central_series(ActionSpec({{"a", IntMatrix{{1, 1}, {0, 1}}}, {"b", IntMatrix{{1, 0}, {1, 1}}}}), 4, 1, 8);
    EXPECT_FALSE(r2.nilpotent);
}

TEST(LowerCentralSeries, NilpotentT9)
{
    auto spec = t9_nilpotent();
    auto r = lower_central_series(spec, 4, 1);
    EXPECT_TRUE(r.nilpotent);
    EXPECT_EQ(r.length, 2);
    auto d = commutator_chain(spec.get("A"), spec.get("B"), 3);
    EXPECT_EQ(d[0], kron(IntMatrix::identity(3), commutator(heis_x, heis_y)));
    EXPECT_TRUE(d[1].is_identity());
    EXPECT_TRUE(d[2].is_identity());
}

TEST(HigherRank, DependentPair)
{
    auto v = is_higher_rank(cat, cat.pow(2), 3);
    EXPECT_FALSE(v.pass);
    ASSERT_TRUE(v.failing_k.has_value());
    EXPECT_EQ((*v.failing_k)[0], 2);
    EXPECT_EQ((*v.failing_k)[1], -1);
}

TEST(HigherRank, IdentityPartner)
{
    auto v = is_higher_rank(cat, IntMatrix::identity(2), 3);
    EXPECT_FALSE(v.pass);
    ASSERT_TRUE(v.failing_k.has_value());
    EXPECT_EQ((*v.failing_k)[0], 0);
    EXPECT_EQ((*v.failing_k)[1], 1);
}

TEST(HigherRank, CubicUnits)
{
    auto v = is_higher_rank(cubic_a(), cubic_b(), 4);
    EXPECT_TRUE(v.pass) << v.reason;
    EXPECT_GT(v.growth.tau, 0);
}

TEST(Gph, SingleCatMap)
{
    auto v = is_genuinely_partially_hyperbolic(ActionSpec({{"a", cat}}));
    EXPECT_TRUE(v.has_ergodic);
    EXPECT_FALSE(v.no_hyperbolic);
    EXPECT_FALSE(v.pass);
}

TEST(Gph, SalemSextic)
{
    IntMatrix s(companion(IntPolynomial{1, 0, -1, -1, -1, 0, 1}));
    auto v = is_genuinely_partially_hyperbolic(ActionSpec({{"s", s}}), 3);
    EXPECT_TRUE(v.has_ergodic);
    EXPECT_TRUE(v.no_hyperbolic);
    EXPECT_TRUE(v.common_neutral);
    EXPECT_EQ(v.neutral_dim, 4u);
    EXPECT_TRUE(v.pass);
}

TEST(Gph, UnipotentOnly)
{
    auto v = is_genuinely_partially_hyperbolic(ActionSpec({{"x", heis_x}, {"y", heis_y}}));
    EXPECT_FALSE(v.has_ergodic);
    EXPECT_FALSE(v.pass);
}

TEST(ConjugateErgodicity, NilpotentCommutator)
{
    auto spec = t9_nilpotent();
    const IntMatrix& a = spec.get("A");
    EXPECT_TRUE(conjugate_ergodicity_check(IntMatrix::identity(9), a));
    IntMatrix x = commutator(a, spec.get("B"));
    EXPECT_FALSE(x.is_identity());
    EXPECT_TRUE(conjugate_ergodicity_check(x, a));
    EXPECT_TRUE(conjugate_ergodicity_check(x.pow(3), spec.get("B")));
    EXPECT_THROW(conjugate_ergodicity_check(x, IntMatrix::identity(9)), std::invalid_argument);
}

TEST(ConjugateErgodicity, SquareZeroUnipotentTimesCatBlock)
{
    auto spec = t4_family();
    EXPECT_TRUE(conjugate_ergodicity_check(spec.get("A2"), spec.get("A1")));
    EXPECT_TRUE(conjugate_ergodicity_check(spec.get("A3").inverse(), spec.get("A1")));
}

TEST(ConjugateErgodicity, NonNilpotentCommutatorRefused)
{
    // A2, A3 generate a copy of SL(2,Z); their commutator is M (x) I with M hyperbolic,
    // and M (x) C has the eigenvalue 1, so the product is not ergodic
    auto spec = t4_family();
    IntMatrix x = commutator(spec.get("A2"), spec.get("A3"));
    EXPECT_THROW(conjugate_ergodicity_check(x, spec.get("A1")), std::invalid_argument);
    EXPECT_FALSE(is_ergodic(x * spec.get("A1")));
}

TEST(Properties, CommutatorWordsAreUnimodularAndNotErgodic)
{
    auto spec = t9_nilpotent();
    auto ball = word_ball(spec, 2);
    int checked = 0;
    for (std::size_t i = 0; i < ball.size(); i += 3)
        for (std::size_t j = 1; j < ball.size(); j += 5) {
            IntMatrix z = commutator(ball[i].second, ball[j].second);
            EXPECT_EQ(unit_circle_count(char_poly(z)), 9);
            EXPECT_FALSE(is_ergodic(z));
            ++checked;
        }
    EXPECT_GT(checked, 20);
}

TEST(Properties, ReorderingGrowsPolynomially)
{
    ActionSpec spec({{"x", heis_x}, {"y", heis_y}});
    std::mt19937_64 rng(17);
    std::vector<double> ln, lnorm;
    for (int n = 2; n <= 12; ++n) {
        double worst = 1;
        for (int s = 0; s < 40; ++s) {
            Word w;
            for (int i = 0; i < n; ++i)
                w.letters.emplace_back(rng() % 2 ? "x" : "y", rng() % 2 ? 1 : -1);
            Word sorted = w;
            std::stable_sort(sorted.letters.begin(), sorted.letters.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            IntMatrix d = sorted.eval(spec) * w.eval(spec).inverse();
            worst = std::max(worst, d.square().frobenius());
        }
        ln.push_back(std::log(double(n)));
        lnorm.push_back(std::log(worst));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ln.size(); ++i) {
        mx += ln[i];
        my += lnorm[i];
    }
    mx /= ln.size();
    my /= ln.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ln.size(); ++i) {
        sxy += (ln[i] - mx) * (lnorm[i] - my);
        sxx += (ln[i] - mx) * (ln[i] - mx);
    }
    // a reordered Heisenberg word differs by a central element of size O(n^2)
    EXPECT_LE(sxy / sxx, 2.0 + 0.5);
}

TEST(Properties, UnimodularSpectraGrowSubexponentially)
{
    ActionSpec spec({{"x", heis_x}, {"y", heis_y}});
    std::vector<double> rate;
    for (int n = 3; n <= 20; ++n) {
        double worst = 1;
        for (int split_at = 0; split_at <= n; ++split_at) {
            IntMatrix m = heis_x.pow(split_at) * heis_y.pow(n - split_at);
            worst = std::max(worst, m.square().frobenius());
        }
        rate.push_back(std::log(worst) / n);
    }
    for (std::size_t i = 1; i < rate.size(); ++i)
        EXPECT_LE(rate[i], rate[i - 1] + 1e-12);
}

TEST(Properties, ConjugatedGeneratorOnLyapunovSpaces)
{
    auto spec = t9_nilpotent();
    const IntMatrix& a = spec.get("A");
    const IntMatrix& y = spec.get("B");
    auto t = lyapunov_table({a});
    ASSERT_EQ(t.rows.size(), 3u);
    const double N = 9;
    for (const auto& row : t.rows) {
        Eigen::MatrixXd Y = detail::to_double(y.square());
        double base = (Y * row.basis).norm();
        auto ratio = [&](int n) {
            Eigen::MatrixXd M = detail::to_double((a.pow(n) * y * a.pow(-n)).square());
            return (M * row.basis).norm() / base;
        };
        double C = ratio(1) / std::pow(2.0, 2 * N);
        for (int n = -10; n <= 10; ++n)
            EXPECT_LE(ratio(n), C * std::pow(std::abs(n) + 1.0, 2 * N) * (1 + 1e-9) + (n == 0 ? 1 : 0));
    }
}
