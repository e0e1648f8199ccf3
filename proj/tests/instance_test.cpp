#include <gtest/gtest.h>

#include "support.hpp"

using namespace bsm;
using bsm::testing::two_by_two;

TEST(Instance, ParsesListForm)
{
    auto inst = two_by_two();
    EXPECT_EQ(inst.num_men(), 2u);
    EXPECT_EQ(inst.num_women(), 2u);
    EXPECT_TRUE(inst.contiguous());
    EXPECT_FALSE(inst.functional());
    ASSERT_TRUE(inst.target());
    EXPECT_EQ(*inst.target(), 4);
    EXPECT_EQ(inst.man_rank(0, 0), 1);
    EXPECT_EQ(inst.man_rank(0, 1), 2);
    EXPECT_EQ(inst.woman_rank(0, 1), 1);
}

TEST(Instance, DuplicateListEntryIsRejected)
{
    const char* text = "men: m1 m2\nwomen: w1 w2\nm1: w2 w2\nm2: w2 w1\nw1: m2 m1\nw2: m1 m2\n";
    EXPECT_THROW(parse_instance(text), ValidationError);
}

TEST(Instance, FunctionalFormKeepsGaps)
{
    auto inst = parse_instance("men: m1\nwomen: w1 w2\nm1: w1=1 w2=3\nw1: m1=1\nw2: m1=1\n");
    EXPECT_FALSE(inst.contiguous());
    EXPECT_TRUE(inst.functional());
    EXPECT_EQ(inst.man_rank(0, 0), 1);
    EXPECT_EQ(inst.man_rank(0, 1), 3);
    ASSERT_TRUE(inst.first_gap(Side::man, 0));
    EXPECT_EQ(*inst.first_gap(Side::man, 0), 2);
}

TEST(Instance, MutualityIsEnforced)
{
    EXPECT_THROW(parse_instance("men: m1\nwomen: w1\nm1: w1\nw1:\n"), ValidationError);
}

TEST(Instance, UnknownPersonIsRejected)
{
    EXPECT_THROW(parse_instance("men: m1\nwomen: w1\nm1: w9\nw1: m1\n"), ValidationError);
}

TEST(Instance, SyntaxErrors)
{
    EXPECT_THROW(parse_instance("men m1\nwomen: w1\n"), ParseError);
    EXPECT_THROW(parse_instance("men: m1\n"), ParseError);
    EXPECT_THROW(parse_instance("men: m1\nwomen: w1\nm1: w1=0\nw1: m1=1\n"), ParseError);
    EXPECT_THROW(parse_instance("men: m1\nwomen: w1\nk: -3\n"), ParseError);
    EXPECT_THROW(parse_instance("{\"men\": [\"m1\"]"), ParseError);
}

TEST(Instance, EmptyAcceptanceSetsAreLegal)
{
    auto inst = parse_instance("men: m1 m2\nwomen: w1\nm1: w1\nm2:\nw1: m1\n");
    EXPECT_TRUE(inst.prefs(Side::man, 1).empty());
}

TEST(Instance, ToFunctionalKeepsRanks)
{
    auto inst = two_by_two();
    auto f = to_functional(inst);
    EXPECT_TRUE(f.functional());
    for (int m = 0; m < 2; ++m)
        for (int w = 0; w < 2; ++w) {
            EXPECT_EQ(f.man_rank(m, w), inst.man_rank(m, w));
            EXPECT_EQ(f.woman_rank(w, m), inst.woman_rank(w, m));
        }

    auto single = to_functional(parse_instance("men: m1\nwomen: w1\nm1: w1\nw1: m1\n"));
    EXPECT_EQ(single.man_rank(0, 0), 1);

    std::mt19937_64 rng(7);
    auto three = random_instance(rng, {3, 3, 1.0});
    auto three_f = to_functional(three);
    for (int m = 0; m < 3; ++m)
        for (const auto& e : three.prefs(Side::man, m))
            EXPECT_EQ(three_f.man_rank(m, e.partner), e.rank);
}

TEST(Instance, FunctionalToLists)
{
    auto contiguous = to_functional(two_by_two());
    auto lists = functional_to_lists(contiguous);
    EXPECT_TRUE(lists.contiguous());
    EXPECT_EQ(lists.man_rank(1, 0), 2);

    auto gappy = parse_instance("men: m1\nwomen: w1 w2\nm1: w1=1 w2=3\nw1: m1=1\nw2: m1=1\n");
    EXPECT_THROW(functional_to_lists(gappy), GapError);
}

TEST(Instance, RoundTripText)
{
    auto inst = two_by_two();
    EXPECT_EQ(parse_instance(serialize(inst)), inst);

    auto gappy = parse_instance("men: m1\nwomen: w1 w2\nm1: w1=1 w2=3\nw1: m1=1\nw2: m1=1\n");
    auto again = parse_instance(serialize(gappy));
    EXPECT_EQ(again, gappy);
    EXPECT_EQ(again.man_rank(0, 1), 3);
}

TEST(Instance, EmptyInstanceSerializes)
{
    InstanceBuilder b;
    b.set_target(0);
    auto empty = b.build();
    auto again = parse_instance(serialize(empty));
    EXPECT_EQ(again.num_men(), 0u);
    EXPECT_EQ(again.num_women(), 0u);
    ASSERT_TRUE(again.target());
    EXPECT_EQ(*again.target(), 0);
}

TEST(Instance, RoundTripRandomBothFormats)
{
    for (const auto& inst : bsm::testing::corpus(11, 200)) {
        EXPECT_EQ(parse_instance(serialize(inst, Format::text)), inst);
        EXPECT_EQ(parse_instance(serialize(inst, Format::json)), inst);
    }
}

TEST(Instance, MatchingParsing)
{
    auto inst = two_by_two();
    auto mu = parse_matching(inst, "m1 w2\nm2 w1\n");
    EXPECT_EQ(mu.wife(0), 1);
    EXPECT_EQ(mu.wife(1), 0);
    auto json_mu = parse_matching(inst, "[[\"m1\",\"w2\"],[\"m2\",\"w1\"]]");
    EXPECT_EQ(json_mu, mu);
    EXPECT_THROW(parse_matching(inst, "m1 w1\nm2 w1\n"), InvalidMatching);
}

TEST(Instance, MakeMatchingRejectsUnacceptablePairs)
{
    auto inst = parse_instance("men: m1 m2\nwomen: w1\nm1: w1\nm2:\nw1: m1\n");
    std::vector<std::pair<int, int>> bad{{1, 0}};
    EXPECT_THROW(make_matching(inst, bad), InvalidMatching);
}
