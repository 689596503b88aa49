#include <torikam/examples_search.hpp>

#include <gtest/gtest.h>

using namespace torikam;

namespace {

const IntMatrix cat{{2, 1}, {1, 1}};

bool same(const std::vector<Certificate>& a, const std::vector<Certificate>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].predicate != b[i].predicate || a[i].pass != b[i].pass)
            return false;
    return true;
}

} // namespace

TEST(BlockFamily, TwoBlocksOverCat)
{
    auto r = theorem2_family(2, cat);
    EXPECT_EQ(r.spec.dim, 4u);
    ASSERT_EQ(r.spec.generators.size(), 3u);
    EXPECT_TRUE(r.all_pass());
    EXPECT_TRUE(same(recertify(r), r.certificates));
    const auto& a2 = r.spec.get("A2");
    EXPECT_EQ(a2(0, 2), BigInt(1));
    EXPECT_EQ(a2(1, 3), BigInt(1));
}

TEST(BlockFamily, ThreeBlocks)
{
    auto r = theorem2_family(3, cat);
    EXPECT_EQ(r.spec.dim, 6u);
    EXPECT_EQ(r.spec.generators.size(), 7u);
    EXPECT_TRUE(r.all_pass());
}

TEST(BlockFamily, Refusals)
{
    EXPECT_THROW(theorem2_family(1, cat), std::invalid_argument);
    EXPECT_THROW(theorem2_family(2, IntMatrix{{1, 1}, {0, 1}}), std::invalid_argument);
    EXPECT_THROW(theorem2_family(2, IntMatrix{{0, -1}, {1, 0}}), std::invalid_argument);
}

TEST(ReciprocalSearch, DegreeTwoIsEmpty)
{
    EXPECT_TRUE(search_reciprocal_nonhyperbolic(2, 5).empty());
}

TEST(ReciprocalSearch, DegreeFourSalem)
{
    auto hits = search_reciprocal_nonhyperbolic(4, 2);
    ASSERT_FALSE(hits.empty());
    bool lehmer_like = false;
    for (const auto& h : hits) {
        EXPECT_EQ(h.unimodular_roots, 2);
        lehmer_like = lehmer_like || h.poly.coeffs() == std::vector<BigInt>{1, -1, -1, -1, 1};
    }
    EXPECT_TRUE(lehmer_like);
}

TEST(ReciprocalSearch, DegreeSixCertifiedAndDeterministic)
{
    auto a = search_reciprocal_nonhyperbolic(6, 3);
    auto b = search_reciprocal_nonhyperbolic(6, 3);
    ASSERT_FALSE(a.empty());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_TRUE(a[i].poly.coeffs() == b[i].poly.coeffs());
        auto r = recipe_from_hit(a[i], 3);
        EXPECT_TRUE(r.all_pass());
        EXPECT_TRUE(same(recertify(r), r.certificates));
        const int on = a[i].unimodular_roots;
        EXPECT_GT(on, 0);
        EXPECT_LT(on, 6);
    }
}

TEST(ReciprocalSearch, RejectsOddDegree)
{
    EXPECT_THROW(search_reciprocal_nonhyperbolic(5, 1), std::invalid_argument);
}

TEST(Assembly, SeedChecksAndHonestReport)
{
    EXPECT_THROW(assemble_higher_rank_ph(cat, "centralizer"), std::invalid_argument);
    auto hits = search_reciprocal_nonhyperbolic(4, 2);
    ASSERT_FALSE(hits.empty());
    const IntMatrix seed = hits.front().companion_matrix;
    EXPECT_THROW(assemble_higher_rank_ph(seed, "bogus"), std::invalid_argument);
    for (const std::string s : {"centralizer", "block-nilpotent"}) {
        auto rep = assemble_higher_rank_ph(seed, s);
        EXPECT_FALSE(rep.reason.empty());
        if (rep.recipe) {
            EXPECT_TRUE(rep.recipe->all_pass());
        } else {
            EXPECT_NE(rep.reason.find("none"), std::string::npos);
        }
    }
}

TEST(BlockFamily, UnipotentCommutatorsKeepA1Ergodic)
{
    for (int blocks : {2, 3}) {
        auto r = theorem2_family(blocks, cat);
        const IntMatrix& a1 = r.spec.get("A1");
        std::size_t checked = 0;
        for (const auto& [wx, x] : word_ball(r.spec, 1))
            for (const auto& [wy, y] : word_ball(r.spec, 1)) {
                IntMatrix z = commutator(x, y);
                if (unit_circle_count(char_poly(z)) != int(z.dim()))
                    continue;
                EXPECT_TRUE(conjugate_ergodicity_check(z, a1));
                ++checked;
            }
        EXPECT_GT(checked, 0u);
    }
}

TEST(BlockFamily, NotNilpotentSoCommutatorsCanBreakErgodicity)
{
    auto r = theorem2_family(2, cat);
    const IntMatrix& a1 = r.spec.get("A1");
    IntMatrix z = commutator(r.spec.get("A2"), r.spec.get("A3"));
    EXPECT_LT(unit_circle_count(char_poly(z)), int(z.dim()));
    EXPECT_FALSE(is_ergodic(z * a1));
    EXPECT_FALSE(lower_central_series(r.spec).nilpotent);
}
