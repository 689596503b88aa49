#include <torikam/json_io.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace torikam;

namespace {

const IntMatrix cat{{2, 1}, {1, 1}};

} // namespace

TEST(JsonIo, MatrixAndActionRoundTrip)
{
    ActionSpec spec({{"A1", block_diag({cat, cat})}, {"A2", IntMatrix::identity(4)}});
    auto back = action_from_json(parse_json_text(action_to_json(spec).dump()));
    ASSERT_EQ(back.generators.size(), 2u);
    EXPECT_EQ(back.generators[0].first, "A1");
    EXPECT_TRUE(back.generators[0].second == spec.generators[0].second);
    EXPECT_TRUE(action_from_json(parse_json_text("[[2,1],[1,1]]")).generators[0].second == cat);
    auto arr = action_from_json(parse_json_text(R"({"generators":[{"name":"z","matrix":[[1,1],[1,2]]}]})"));
    EXPECT_EQ(arr.generators[0].first, "z");
}

TEST(JsonIo, ParseErrorCarriesLineAndColumn)
{
    try {
        parse_json_text("{\"a\": [1,\n  2 3]}", "x.json");
        FAIL();
    } catch (const JsonError& e) {
        EXPECT_EQ(e.line, 2u);
        EXPECT_EQ(e.column, 5u);
        EXPECT_NE(std::string(e.what()).find("x.json:2:5"), std::string::npos);
    }
}

TEST(JsonIo, SchemaErrors)
{
    EXPECT_THROW(matrix_from_json(parse_json_text("[[1,2],[3]]")), SchemaError);
    EXPECT_THROW(matrix_from_json(parse_json_text("[[2,0],[0,1]]")), SchemaError); // det 2
    EXPECT_THROW(action_from_json(parse_json_text(R"({"foo": 1})")), SchemaError);
    EXPECT_THROW(action_from_json(parse_json_text(R"({"generators": {"a": [[1]], "b": [[1,0],[0,1]]}})")),
                 SchemaError);
}

TEST(JsonIo, FourierRoundTrip)
{
    std::mt19937_64 rng(1);
    auto q = random_rational_map(2, 2, 4, 7, rng, true);
    EXPECT_TRUE(fourier_from_json<Rational>(parse_json_text(fourier_to_json(q).dump())) == q);
    auto d = random_map(3, 3, 2, 1.0, rng, true);
    EXPECT_TRUE(fourier_from_json<double>(parse_json_text(fourier_to_json(d).dump())) == d);
    auto bad = parse_json_text(
        R"({"dim_in":2,"modes":[{"k":[1,0],"c":[[1,0],[0,0]]},{"k":[-1,0],"c":[[2,0],[0,0]]}]})");
    EXPECT_THROW(fourier_from_json<double>(bad), SchemaError);
}

TEST(JsonIo, RecipesRecertifyOnLoad)
{
    auto hits = search_reciprocal_nonhyperbolic(4, 2);
    ASSERT_FALSE(hits.empty());
    std::vector<ExampleRecipe> rs{theorem2_family(2, cat), recipe_from_hit(hits.front(), 2)};
    auto db = recipes_from_jsonl(recipes_to_jsonl(rs));
    ASSERT_EQ(db.size(), 2u);
    for (const auto& r : db)
        EXPECT_TRUE(r.agrees);
    // a tampered certificate is caught
    auto j = recipe_to_json(rs[0]);
    j["certificates"][0]["pass"] = false;
    auto tampered = recipe_from_json(j);
    EXPECT_FALSE(tampered.agrees);
    // a tampered matrix is re-certified, not trusted
    auto k = recipe_to_json(rs[0]);
    k["action"]["generators"]["A1"] = Json::parse("[[1,1,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]");
    EXPECT_FALSE(recipe_from_json(k).agrees);
}

TEST(JsonIo, KamConfigRoundTrip)
{
    KamRunConfig c;
    c.base = ActionSpec({{"a", cat}, {"b", cat.inverse()}});
    c.epsilon = 2e-3;
    c.seed = 9;
    c.kam.trunc_radius = 16;
    c.kam.grid_size = 64;
    auto back = kam_config_from_json(parse_json_text(kam_config_to_json(c).dump()));
    EXPECT_EQ(back.seed, 9u);
    EXPECT_EQ(back.epsilon, 2e-3);
    EXPECT_EQ(back.kam.grid_size, 64u);
    auto pa1 = build_perturbed_action(c);
    auto pa2 = build_perturbed_action(back);
    EXPECT_TRUE(pa1.R("a") == pa2.R("a"));
}
