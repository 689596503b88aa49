#include <torikam/verify.hpp>

#include <gtest/gtest.h>

using namespace torikam;

namespace {

const IntMatrix cat{{2, 1}, {1, 1}};
const IntMatrix cubic_a(companion(IntPolynomial{1, -3, 0, 1}));
const IntMatrix cubic_b(companion(IntPolynomial{1, -3, 0, 1}) - SquareIntMatrix::identity(3));
const IntMatrix u4{{1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}};
const IntMatrix l4{{1, 0, 0, 0}, {0, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}};

} // namespace

TEST(PairGrowthCheck, CubicUnitsPass)
{
    auto r = verify_pair_growth(cubic_a, cubic_b, 4, 8, 0.9, 3.0, 2, 5);
    EXPECT_TRUE(r.ok) << r.note;
    EXPECT_GT(r.c_train, 0.0);
    EXPECT_GE(r.c_train, r.c_full);
    EXPECT_GE(r.c_full, r.c_fit);
    EXPECT_GT(r.samples, 0u);
}

TEST(PairGrowthCheck, DependentPairRefused)
{
    auto r = verify_pair_growth(cat, cat.pow(2), 2, 3);
    EXPECT_FALSE(r.ok);
    EXPECT_NE(r.note.find("not higher rank"), std::string::npos);
}

TEST(UnipotentGrowthCheck, BlockFamily)
{
    const IntMatrix f = block_diag({cat, cat});
    auto r = verify_unipotent_growth(f, u4, 3, 10, 4, -1, 2, 5, 3);
    EXPECT_TRUE(r.ok) << r.note;
    EXPECT_GT(r.c_full, 0.0);
    EXPECT_GE(r.c_full, r.c_fit);
    EXPECT_THROW(verify_unipotent_growth(f, f, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(verify_unipotent_growth(f, block_diag({IntMatrix{{1, 1}, {0, 1}}, IntMatrix::identity(2)}), 1, 1, 1), std::invalid_argument);
}

TEST(DisplacementCheck, BelowThresholdRowsAreLabeled)
{
    const IntMatrix a = block_diag({cat, cat}) * l4;
    auto found = verify_displacement_suite(a.dual(), {u4.dual(), u4.inverse().dual()}, 30, 50, {1}, 500);
    ASSERT_TRUE(found.n.has_value());
    EXPECT_EQ(found.violations, 0u);
    EXPECT_TRUE(found.rows.back().pass);
    if (*found.n > 1) {
        auto low = verify_displacement_at(a.dual(), {u4.dual(), u4.inverse().dual()}, 30, 1, {1}, 500);
        EXPECT_FALSE(low.rows.front().pass);
        EXPECT_NE(low.rows.front().detail.find("below"), std::string::npos);
    }
}
