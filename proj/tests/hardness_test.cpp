#include <set>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace bsm;
using bsm::testing::triangle_plus_two_edges;

namespace {

Graph graph_of(int n, std::vector<std::pair<int, int>> edges)
{
    GraphBuilder b;
    for (int i = 0; i < n; ++i)
        b.vertex("v" + std::to_string(i + 1));
    for (auto [u, v] : edges)
        b.edge(u, v);
    return b.build();
}

const ReductionArtifact& small_artifact()
{
    static const ReductionArtifact art = reduce_clique(triangle_plus_two_edges(), 3);
    return art;
}

int edge_index(const Graph& g, int u, int v)
{
    auto key = std::minmax(u, v);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (g.edges[e] == std::make_pair(key.first, key.second))
            return static_cast<int>(e);
    return -1;
}

} // namespace

TEST(Hardness, ArithmeticForSevenVerticesFiveEdges)
{
    EXPECT_EQ(reduction_delta(7, 5, 3), 156);
    EXPECT_EQ(reduction_parameter(3), 36);
    const auto& art = small_artifact();
    EXPECT_FALSE(art.fallback);
    EXPECT_EQ(art.delta, 156);
    EXPECT_EQ(art.inst.num_men(), 181u);
    EXPECT_EQ(art.inst.num_women(), 181u);
    EXPECT_EQ(art.k_hat, 373);
    EXPECT_EQ(art.t, 36);
    ASSERT_TRUE(art.inst.target());
    EXPECT_EQ(*art.inst.target(), 373);
}

TEST(Hardness, OptimaFollowClosedForms)
{
    const auto& art = small_artifact();
    auto o = optima(art.inst);
    EXPECT_EQ(o.om, 181 + 156);
    EXPECT_EQ(o.ow, 181);
    EXPECT_EQ(o.man_optimal, closed_form_man_optimal(art));
    EXPECT_EQ(o.woman_optimal, closed_form_woman_optimal(art));
    EXPECT_EQ(art.k_hat - std::max(o.om, o.ow), art.t);
}

TEST(Hardness, SmallGraphsFallBack)
{
    auto triangle = graph_of(3, {{0, 1}, {1, 2}, {0, 2}});
    auto yes = reduce_clique(triangle, 3);
    EXPECT_TRUE(yes.fallback);
    ASSERT_TRUE(yes.fallback_answer);
    EXPECT_TRUE(*yes.fallback_answer);
    EXPECT_EQ(yes.inst.num_men(), 0u);
    EXPECT_TRUE(decide_above_max(yes.inst, yes.k_hat).answer);

    auto path = graph_of(3, {{0, 1}, {1, 2}});
    auto no = reduce_clique(path, 3);
    EXPECT_TRUE(no.fallback);
    EXPECT_FALSE(*no.fallback_answer);
    EXPECT_FALSE(decide_above_max(no.inst, no.k_hat).answer);
}

TEST(Hardness, CliqueBruteForce)
{
    auto triangle = graph_of(3, {{0, 1}, {1, 2}, {0, 2}});
    EXPECT_EQ(clique_bruteforce(triangle, 3), (std::vector<int>{0, 1, 2}));
    EXPECT_FALSE(clique_bruteforce(graph_of(3, {{0, 1}, {1, 2}}), 3));

    // A 5-cycle on v1..v5 and a triangle v1 v6 v7 hanging off it.
    auto planted = graph_of(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {5, 6}, {6, 0}, {0, 5}});
    EXPECT_EQ(clique_bruteforce(planted, 3), (std::vector<int>{0, 5, 6}));
    EXPECT_FALSE(clique_bruteforce(planted, 4));
}

TEST(Hardness, WitnessIsStableAndBalanced)
{
    const auto& art = small_artifact();
    auto mu = witness_matching(art, {0, 1, 2});
    EXPECT_TRUE(blocking_pairs(art.inst, mu).empty());
    auto o = objectives(art.inst, mu);
    EXPECT_EQ(o.men_cost, 373);
    EXPECT_EQ(o.women_cost, 373);
    EXPECT_EQ(o.balance, 373);
    EXPECT_THROW(witness_matching(art, {0, 1, 3}), NotAClique);
}

TEST(Hardness, NonCliqueSelectionIsBlocked)
{
    // v1 v2 v3 is a path here, so three selected edges must leave the set.
    auto g = graph_of(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {5, 6}});
    auto art = reduce_clique(g, 3);
    ASSERT_FALSE(art.fallback);
    std::vector<bool> in_u(7, false), in_s(g.edges.size(), false);
    in_u[0] = in_u[1] = in_u[2] = true;
    in_s[edge_index(g, 0, 1)] = in_s[edge_index(g, 1, 2)] = true;
    const int leaving = edge_index(g, 2, 3);
    in_s[leaving] = true;
    auto bp = blocking_pairs(art.inst, candidate_matching(art, in_u, in_s));
    const auto& names = art.edge_people[leaving];
    const int m = *art.inst.find(Side::man, names[0]);
    const int w = *art.inst.find(Side::woman, art.vertex_people[3][2]);
    EXPECT_NE(std::find(bp.begin(), bp.end(), std::make_pair(m, w)), bp.end());
}

TEST(Hardness, SingleVertexWitnessSwapsOnlyItsPair)
{
    auto art = reduce_clique(triangle_plus_two_edges(), 1);
    ASSERT_FALSE(art.fallback);
    auto mu = witness_matching(art, {2});
    auto mm = closed_form_man_optimal(art);
    std::set<std::string> moved;
    for (int m = 0; m < static_cast<int>(art.inst.num_men()); ++m)
        if (mu.wife(m) != mm.wife(m))
            moved.insert(art.inst.man_name(m));
    EXPECT_EQ(moved, (std::set<std::string>{art.vertex_people[2][0], art.vertex_people[2][1]}));
    EXPECT_TRUE(is_stable(art.inst, mu));
}

TEST(Hardness, StructuredFamily)
{
    const auto& art = small_artifact();
    const int nv = art.layout.nv, ne = art.layout.ne;
    auto empty = candidate_matching(art, std::vector<bool>(nv, false), std::vector<bool>(ne, false));
    EXPECT_TRUE(is_stable(art.inst, empty));
    EXPECT_EQ(empty, man_optimal(art.inst));
    auto full = candidate_matching(art, std::vector<bool>(nv, true), std::vector<bool>(ne, true));
    EXPECT_TRUE(is_stable(art.inst, full));
    EXPECT_EQ(full, woman_optimal(art.inst));

    // Edge v4 v5 selected while v5 stays out.
    std::vector<bool> in_u(nv, false), in_s(ne, false);
    in_u[3] = true;
    in_s[edge_index(art.graph, 3, 4)] = true;
    EXPECT_FALSE(is_stable(art.inst, candidate_matching(art, in_u, in_s)));

    auto fam = structured_enumerate(art);
    EXPECT_TRUE(fam.has_man_optimal);
    EXPECT_TRUE(fam.has_woman_optimal);
    EXPECT_EQ(fam.candidates, std::uint64_t{1} << (nv + ne));
    ASSERT_TRUE(fam.bal_opt);
    EXPECT_EQ(*fam.bal_opt, 373);
    for (const auto& c : fam.stable) {
        auto mu = materialize(art, c);
        for (int i = 1; i <= static_cast<int>(art.delta); ++i)
            EXPECT_EQ(mu.wife(art.layout.dummy(i)), art.layout.dummy(i));
        EXPECT_EQ(mu.wife(art.layout.star()), art.layout.star());
    }
}

TEST(Hardness, StructuredFamilyIsExhaustive)
{
    // Independent enumeration that only uses the optimal-partner bounds.
    const auto& art = small_artifact();
    auto fam = to_stable_set(art, structured_enumerate(art));
    auto sandwich = enumerate_stable_sandwich(art.inst);
    std::set<std::vector<int>> a, b;
    for (const auto& mu : fam.matchings)
        a.insert(mu.wives());
    for (const auto& mu : sandwich.matchings)
        b.insert(mu.wives());
    EXPECT_EQ(a, b);
    EXPECT_EQ(fam.bal_opt, sandwich.bal_opt);
}

TEST(Hardness, StructuredFamilyIsExhaustiveOnRandomGraphs)
{
    std::mt19937_64 rng(61);
    for (int i = 0; i < 6; ++i) {
        auto g = random_graph(rng, 7, 4 + i % 3, i % 2 == 0);
        auto art = reduce_clique(g, 3);
        ASSERT_FALSE(art.fallback);
        auto fam = to_stable_set(art, structured_enumerate(art));
        auto sandwich = enumerate_stable_sandwich(art.inst);
        EXPECT_EQ(fam.matchings.size(), sandwich.matchings.size()) << serialize(g);
        EXPECT_EQ(fam.bal_opt, sandwich.bal_opt) << serialize(g);
    }
}

TEST(Hardness, VerifyReduction)
{
    auto planted = verify_reduction(triangle_plus_two_edges(), 3);
    EXPECT_TRUE(planted.clique);
    EXPECT_TRUE(planted.reduction_answer);
    EXPECT_TRUE(planted.agree);
    EXPECT_TRUE(planted.witness_ok);

    // A 5-cycle plus a disjoint edge has no triangle.
    auto free = verify_reduction(graph_of(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {5, 6}}), 3);
    EXPECT_FALSE(free.fallback);
    EXPECT_FALSE(free.clique);
    EXPECT_FALSE(free.reduction_answer);
    EXPECT_TRUE(free.agree);

    auto tiny = verify_reduction(graph_of(3, {{0, 1}, {1, 2}, {0, 2}}), 3);
    EXPECT_TRUE(tiny.fallback);
    EXPECT_TRUE(tiny.agree);
}

TEST(Hardness, VerifyReductionNineVertices)
{
    std::mt19937_64 rng(62);
    for (int i = 0; i < 4; ++i) {
        auto g = random_graph(rng, 9, 6 + i, i % 2 == 0);
        auto rep = verify_reduction(g, 3);
        EXPECT_TRUE(rep.agree) << serialize(g);
        EXPECT_EQ(rep.clique, i % 2 == 0);
    }
}

TEST(Hardness, GraphParsing)
{
    auto g = parse_graph("# comment\na b\nb c\nd\n");
    EXPECT_EQ(g.vertices.size(), 4u);
    EXPECT_EQ(g.edges.size(), 2u);
    auto again = parse_graph(serialize(g));
    EXPECT_EQ(again.vertices, g.vertices);
    EXPECT_EQ(again.edges, g.edges);
    EXPECT_THROW(parse_graph("a a\n"), ValidationError);
    EXPECT_THROW(parse_graph("a b\nb a\n"), ValidationError);
    EXPECT_THROW(parse_graph("a b c\n"), ParseError);
}
