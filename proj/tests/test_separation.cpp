#include "ampcg/errors.hpp"
#include "ampcg/separation.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

using namespace ampcg;
using oracle::six_node_example;

namespace {

// Every singleton query j, k with every C drawn from the other nodes.
template <typename F>
void for_each_pair_query(std::size_t p, F&& f) {
    for (Node j = 0; j < p; ++j)
        for (Node k = 0; k < p; ++k) {
            if (j == k) continue;
            std::vector<Node> rest;
            for (Node v = 0; v < p; ++v)
                if (v != j && v != k) rest.push_back(v);
            for (std::uint64_t m = 0; m < (1ull << rest.size()); ++m) {
                NodeSet c;
                for (std::size_t i = 0; i < rest.size(); ++i)
                    if (m >> i & 1) c.push_back(rest[i]);
                f(SeparationQuery{{j}, {k}, c});
            }
        }
}

SeparationQuery random_query(std::size_t p, std::mt19937_64& rng) {
    std::vector<Node> order(p);
    for (Node v = 0; v < p; ++v) order[v] = v;
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_int_distribution<std::size_t> size_a(1, 2), size_c(0, p - 4);
    std::size_t na = size_a(rng), nb = size_a(rng), nc = size_c(rng);
    SeparationQuery q;
    std::size_t i = 0;
    for (; i < na; ++i) q.a.push_back(order[i]);
    for (; i < na + nb; ++i) q.b.push_back(order[i]);
    for (; i < na + nb + nc; ++i) q.c.push_back(order[i]);
    std::sort(q.a.begin(), q.a.end());
    std::sort(q.b.begin(), q.b.end());
    std::sort(q.c.begin(), q.c.end());
    return q;
}

}  // namespace

TEST(Separated, SixNodeExample) {
    const auto g = six_node_example();
    EXPECT_TRUE(separated(g, {{1}, {2}, {0}}));
    EXPECT_FALSE(separated(g, {{1}, {2}, {}}));
    EXPECT_FALSE(separated(g, {{1}, {2}, {0, 3}}));
    for (const auto& q : {SeparationQuery{{1}, {2}, {0}}, SeparationQuery{{1}, {2}, {}},
                          SeparationQuery{{1}, {2}, {0, 3}}, SeparationQuery{{4}, {1}, {2, 3}}})
        EXPECT_EQ(separated(g, q), brute_force_separated(g, q));
}

TEST(Separated, DisconnectedAndAdjacent) {
    ChainGraph g(4);
    g.add_directed(0, 1);
    EXPECT_TRUE(separated(g, {{2}, {3}, {}}));
    EXPECT_TRUE(separated(g, {{0}, {3}, {1, 2}}));
    EXPECT_FALSE(separated(g, {{0}, {1}, {}}));
    EXPECT_FALSE(brute_force_separated(g, {{0}, {1}, {}}));
    EXPECT_FALSE(separated(g, {{0}, {1}, {2, 3}}));
}

TEST(Separated, TriplexRules) {
    // Collider X1 -> X2 <- X3 opens only when X2 is conditioned on.
    ChainGraph collider(3);
    collider.add_directed(0, 1);
    collider.add_directed(2, 1);
    EXPECT_TRUE(separated(collider, {{0}, {2}, {}}));
    EXPECT_FALSE(separated(collider, {{0}, {2}, {1}}));

    // X1 -> X2 - X3 is a triplex at X2 as well.
    ChainGraph mixed(3);
    mixed.add_directed(0, 1);
    mixed.add_undirected(1, 2);
    EXPECT_TRUE(separated(mixed, {{0}, {2}, {}}));
    EXPECT_FALSE(separated(mixed, {{0}, {2}, {1}}));

    // X1 - X2 - X3 is not.
    ChainGraph undirected(3);
    undirected.add_undirected(0, 1);
    undirected.add_undirected(1, 2);
    EXPECT_FALSE(separated(undirected, {{0}, {2}, {}}));
    EXPECT_TRUE(separated(undirected, {{0}, {2}, {1}}));
}

TEST(Separated, RejectsBadQueries) {
    const auto g = six_node_example();
    EXPECT_THROW(separated(g, {{}, {1}, {}}), InputError);
    EXPECT_THROW(separated(g, {{1}, {1}, {}}), InputError);
    EXPECT_THROW(separated(g, {{1}, {2}, {1}}), InputError);
    EXPECT_THROW(separated(g, {{1}, {9}, {}}), InputError);
}

TEST(Separated, AgreesWithBruteForceExhaustivelyUpToThreeNodes) {
    std::size_t checked = 0;
    for (std::size_t p = 2; p <= 3; ++p)
        for (const auto& g : enumerate_chain_graphs(p))
            for_each_pair_query(p, [&](const SeparationQuery& q) {
                ASSERT_EQ(separated(g, q), brute_force_separated(g, q)) << describe(g);
                ++checked;
            });
    EXPECT_GT(checked, 0u);
}

TEST(Separated, AgreesWithBruteForceOnRandomFourNodeGraphs) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto g = random_chain_graph(4, 0.6, 0.4, seed);
        for_each_pair_query(4, [&](const SeparationQuery& q) {
            ASSERT_EQ(separated(g, q), brute_force_separated(g, q)) << describe(g);
        });
    }
}

TEST(Separated, AgreesWithBruteForceOnRandomEightNodeQueries) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 150; ++i) {
        const auto g = random_chain_graph(8, 0.3, 0.4, 1000 + i);
        const auto q = random_query(8, rng);
        ASSERT_EQ(separated(g, q), brute_force_separated(g, q)) << describe(g);
    }
}

TEST(Separated, SymmetricAndDecomposable) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        const auto g = random_chain_graph(7, 0.35, 0.4, 50 + i);
        auto q = random_query(7, rng);
        const bool s = separated(g, q);
        EXPECT_EQ(s, separated(g, {q.b, q.a, q.c}));
        if (s)
            for (Node a : q.a) EXPECT_TRUE(separated(g, {{a}, q.b, q.c}));
    }
}

TEST(SeparatedMagnified, SixNodeExampleExhaustive) {
    const auto g = six_node_example();
    const auto mg = magnify(g);
    for_each_pair_query(6, [&](const SeparationQuery& q) {
        ASSERT_EQ(separated(g, q), separated_magnified(mg, q));
    });
}

TEST(SeparatedMagnified, UndirectedPairAndEmptyGraph) {
    ChainGraph g(2);
    g.add_undirected(0, 1);
    const auto mg = magnify(g);
    EXPECT_FALSE(separated_magnified(mg, {{0}, {1}, {}}));
    // The route X1 <- N1 - N2 -> X2 has no triplex and avoids C.
    EXPECT_FALSE(separated(mg.graph, {{0}, {1}, {}}));

    const auto empty = magnify(ChainGraph(3));
    for_each_pair_query(3, [&](const SeparationQuery& q) { EXPECT_TRUE(separated_magnified(empty, q)); });
}

TEST(SeparatedMagnified, RejectsErrorNodes) {
    const auto mg = magnify(six_node_example());
    EXPECT_THROW(separated_magnified(mg, {{0}, {mg.error_of(1)}, {}}), InputError);
    EXPECT_THROW(separated_magnified(mg, {{0}, {1}, {mg.error_of(2)}}), InputError);
}

TEST(SeparatedMagnified, AgreesOnSmallGraphs) {
    for (std::size_t p = 2; p <= 3; ++p)
        for (const auto& g : enumerate_chain_graphs(p)) {
            const auto mg = magnify(g);
            for_each_pair_query(p, [&](const SeparationQuery& q) {
                ASSERT_EQ(separated(g, q), separated_magnified(mg, q)) << describe(g);
            });
        }
}

TEST(AllSeparations, TrivialGraphs) {
    const auto empty = all_separations(ChainGraph(3));
    // 3 pairs, each with the 2 subsets of the remaining node.
    EXPECT_EQ(empty.size(), 6u);

    ChainGraph complete(4);
    for (Node j = 0; j < 4; ++j)
        for (Node k = j + 1; k < 4; ++k) complete.add_directed(j, k);
    EXPECT_TRUE(all_separations(complete).empty());

    EXPECT_THROW(all_separations(ChainGraph(7)), CapacityError);
    EXPECT_NO_THROW(all_separations(ChainGraph(7), 7));
}

TEST(AllSeparations, EquivalentPairHasSameSeparations) {
    ChainGraph collider(3);
    collider.add_directed(0, 1);
    collider.add_directed(2, 1);
    ChainGraph mixed(3);
    mixed.add_directed(0, 1);
    mixed.add_undirected(1, 2);
    ASSERT_TRUE(markov_equivalent(collider, mixed));
    EXPECT_EQ(all_separations(collider), all_separations(mixed));
}

TEST(AllSeparations, SerialMatchesParallel) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = random_chain_graph(6, 0.4, 0.4, seed);
        EXPECT_EQ(all_separations(g, 6, Execution::Serial), all_separations(g, 6, Execution::Parallel));
    }
}

TEST(AllSeparations, MarkovEquivalenceCharacterisationUpToThreeNodes) {
    for (std::size_t p = 2; p <= 3; ++p) {
        const auto graphs = enumerate_chain_graphs(p);
        std::vector<std::vector<PairSeparation>> seps;
        for (const auto& g : graphs) seps.push_back(all_separations(g, 6, Execution::Serial));
        for (std::size_t i = 0; i < graphs.size(); ++i)
            for (std::size_t j = i + 1; j < graphs.size(); ++j)
                ASSERT_EQ(markov_equivalent(graphs[i], graphs[j]), seps[i] == seps[j])
                    << describe(graphs[i]) << " vs " << describe(graphs[j]);
    }
}

TEST(MaskToSet, Expands) {
    EXPECT_EQ(mask_to_set(0), NodeSet{});
    EXPECT_EQ(mask_to_set(0b1011), (NodeSet{0, 1, 3}));
}
