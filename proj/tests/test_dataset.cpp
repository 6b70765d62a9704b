#include <gtest/gtest.h>

#include "beam/dataset.hpp"
#include "test_helpers.hpp"

using namespace beam;
using beam::test::throws_kind;

namespace {

const ParameterSpace& grid()
{
    static const ParameterSpace s({AxisSpec("x", 0, 9, 1), AxisSpec("y", 0, 9, 1)});
    return s;
}

Observation obs(GridIndex i, Outcome y, Origin origin = Origin::suggested)
{
    return {grid().decode(i), y, origin, "2024-01-01T00:00:00Z"};
}

}  // namespace

TEST(Dataset, AppendsInOrder)
{
    Dataset d;
    d.append(obs(3, Outcome::failure, Origin::seed_import));
    d.append(obs(7, Outcome::success));
    d.append(obs(1, Outcome::failure, Origin::manual));
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d[0].config.index, 3u);
    EXPECT_EQ(d[2].config.index, 1u);
    EXPECT_EQ(d.find(7), 1);
    EXPECT_EQ(d.find(8), -1);
    EXPECT_EQ(d.count(Origin::seed_import), 1u);
    EXPECT_EQ(d.count(Origin::manual), 1u);
    EXPECT_EQ(d.successes(), 1u);
}

TEST(Dataset, DuplicateIsRejectedNamingTheEarlierRecord)
{
    Dataset d;
    d.append(obs(3, Outcome::failure));
    d.append(obs(4, Outcome::failure));
    EXPECT_TRUE(throws_kind([&] { d.append(obs(4, Outcome::success)); }, ErrorKind::duplicate, "#2"));
    EXPECT_EQ(d.size(), 2u);
}

TEST(Dataset, EvidenceCarriesBinaryLabels)
{
    Dataset d;
    d.append(obs(3, Outcome::failure));
    d.append(obs(9, Outcome::success));
    const auto e = d.evidence();
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e[0].index, 3u);
    EXPECT_EQ(e[0].label, 0.0);
    EXPECT_EQ(e[1].label, 1.0);
}

TEST(Origin, StringsRoundTrip)
{
    for (Origin o : {Origin::seed_import, Origin::suggested, Origin::manual}) {
        EXPECT_EQ(origin_from_string(to_string(o)), o);
    }
    EXPECT_EQ(to_string(Origin::seed_import), "seed-import");
    EXPECT_TRUE(throws_kind([] { origin_from_string("lab"); }, ErrorKind::format));
}
