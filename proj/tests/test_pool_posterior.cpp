#include <gtest/gtest.h>

#include <algorithm>

#include "beam/pool_posterior.hpp"
#include "oracles.hpp"

using namespace beam;

namespace {

std::shared_ptr<const PoolGeometry> geometry_of(const oracle::Instance& inst, Execution e = Execution::serial)
{
    return std::make_shared<const PoolGeometry>(inst.space, inst.pool, inst.settings.k, inst.settings.neighborhood, e);
}

}  // namespace

TEST(PoolGeometry, GraphAndReverseIndexMatchBruteForce)
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        auto inst = oracle::random_instance(seed);
        inst.settings.neighborhood = Neighborhood::space;
        const auto geo = geometry_of(inst);
        const auto graph = oracle::space_graph(inst.space, inst.settings.k);
        for (std::size_t p = 0; p < geo->size(); ++p) {
            const auto got = geo->graph_neighbors(p);
            ASSERT_EQ(std::vector<GridIndex>(got.begin(), got.end()), graph[inst.pool[p]]) << seed;
            ASSERT_EQ(geo->position_of(inst.pool[p]), p);
        }
        for (GridIndex x = 0; x < inst.space.cardinality(); ++x) {
            std::vector<std::uint32_t> got;
            geo->for_each_reverse(x, [&](std::uint32_t pos) { got.push_back(pos); });
            std::sort(got.begin(), got.end());
            std::vector<std::uint32_t> expected;
            for (std::size_t p = 0; p < inst.pool.size(); ++p) {
                const auto& g = graph[inst.pool[p]];
                if (std::find(g.begin(), g.end(), x) != g.end()) {
                    expected.push_back(static_cast<std::uint32_t>(p));
                }
            }
            ASSERT_EQ(got, expected) << "seed " << seed << " x " << x;
        }
    }
}

TEST(PoolGeometry, PositionOfNonMemberIsEmpty)
{
    const ParameterSpace space({AxisSpec("a", 0, 9, 1)});
    const PoolGeometry geo(space, {1, 4, 8}, 2, Neighborhood::observed, Execution::serial);
    EXPECT_FALSE(geo.position_of(5).has_value());
    EXPECT_EQ(geo.position_of(8), 2u);
}

TEST(PoolPosterior, ProbabilitiesMatchOracle)
{
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const auto inst = oracle::random_instance(seed, 200, seed % 2 == 1);
        const Surrogate model(inst.space, inst.settings, inst.evidence);
        const PoolPosterior post(model, geometry_of(inst));
        for (std::size_t p = 0; p < post.size(); ++p) {
            ASSERT_DOUBLE_EQ(post.probability(p), oracle::predict(inst.space, inst.settings, inst.evidence, inst.pool[p]))
                << "seed " << seed << " candidate " << inst.pool[p];
        }
    }
}

TEST(PoolPosterior, RankingIsDescendingProbabilityThenAscendingIndex)
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto inst = oracle::random_instance(seed);
        const Surrogate model(inst.space, inst.settings, inst.evidence);
        const PoolPosterior post(model, geometry_of(inst));
        const auto r = post.ranking();
        ASSERT_EQ(r.size(), inst.pool.size());
        for (std::size_t i = 1; i < r.size(); ++i) {
            const double a = post.probability(r[i - 1]);
            const double b = post.probability(r[i]);
            ASSERT_TRUE(a > b || (a == b && post.index(r[i - 1]) < post.index(r[i]))) << seed;
        }
    }
}

TEST(PoolPosterior, InactiveCandidatesLeaveTheRanking)
{
    const auto inst = oracle::random_instance(3);
    ASSERT_GE(inst.pool.size(), 3u);
    const Surrogate model(inst.space, inst.settings, inst.evidence);
    std::vector<char> active(inst.pool.size(), 1);
    active[0] = 0;
    active[2] = 0;
    const PoolPosterior post(model, geometry_of(inst), active);
    EXPECT_EQ(post.active_count(), inst.pool.size() - 2);
    for (std::uint32_t p : post.ranking()) {
        EXPECT_TRUE(post.active(p));
    }
}

TEST(PoolPosterior, ShiftedMatchesRefitWhenThePointEnters)
{
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        const auto inst = oracle::random_instance(seed, 60);
        const Surrogate model(inst.space, inst.settings, inst.evidence);
        const PoolPosterior post(model, geometry_of(inst));
        for (GridIndex x : inst.pool) {
            for (std::uint32_t pos : post.affected(x)) {
                for (double y : {0.0, 1.0}) {
                    auto extended = inst.evidence;
                    extended.push_back({x, y});
                    ASSERT_NEAR(post.shifted(pos, y),
                                oracle::predict(inst.space, inst.settings, extended, post.index(pos)), 1e-15)
                        << "seed " << seed << " x " << x;
                }
            }
        }
    }
}

TEST(PoolPosterior, SerialAndParallelConstructionAgree)
{
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
        const auto inst = oracle::random_instance(seed);
        const Surrogate model(inst.space, inst.settings, inst.evidence);
        const PoolPosterior a(model, geometry_of(inst, Execution::serial), {}, Execution::serial);
        const PoolPosterior b(model, geometry_of(inst, Execution::parallel), {}, Execution::parallel);
        for (std::size_t p = 0; p < a.size(); ++p) {
            ASSERT_EQ(a.probability(p), b.probability(p));
        }
        EXPECT_TRUE(std::equal(a.ranking().begin(), a.ranking().end(), b.ranking().begin(), b.ranking().end()));
    }
}
