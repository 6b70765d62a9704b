#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "beam/campaign_file.hpp"
#include "test_helpers.hpp"

using namespace beam;
using beam::test::throws_kind;
namespace fs = std::filesystem;

namespace {

const char* kStamp = "2024-05-01T12:00:00Z";

Campaign sample_campaign()
{
    const ParameterSpace space({AxisSpec("feed", 0.1, 1.0, 0.1), AxisSpec("speed", 200, 600, 50)},
                               {{"laser_power_w", 600}, {"hatch_spacing_max_mm", 1.0}});
    CampaignSettings s;
    s.budget = 5;
    s.batch_size = 2;
    s.seed = 99;
    s.surrogate = {3, 0.05, Neighborhood::space};
    s.pool = {500, 10'000};
    Campaign c(space,
               {IntervalBound{"feed", 0.2, std::numeric_limits<double>::infinity()}, Exclusion{"speed", {400}},
                PairRatio{"speed", "feed", 300, 3000}},
               s);
    c.import_seed_data(std::vector<SeedRecord>{{{0.5, 300}, Outcome::success}, {{0.9, 550}, Outcome::failure}},
                       kStamp);
    auto batch = c.suggest(Execution::serial);
    c.record(batch[0].config.index, Outcome::success, RecordMode::pending, kStamp);
    c.record(batch[1].config.index, Outcome::failure, RecordMode::pending, kStamp);
    c.record(std::vector<double>{0.3, 250}, Outcome::failure, RecordMode::manual, kStamp);
    c.suggest(Execution::serial);
    return c;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path temp_path(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("beam-test-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(CampaignFile, JsonRoundTripPreservesEverything)
{
    const Campaign c = sample_campaign();
    const Campaign back = campaign_from_json(campaign_to_json(c));
    EXPECT_TRUE(back == c);
    EXPECT_EQ(back.state_version(), c.state_version());
    EXPECT_EQ(campaign_to_json(back).dump(2), campaign_to_json(c).dump(2));
}

TEST(CampaignFile, SaveLoadSaveIsByteIdentical)
{
    const auto path = temp_path("round.json");
    save_campaign(sample_campaign(), path);
    const std::string first = read_file(path);
    save_campaign(load_campaign(path), path);
    EXPECT_EQ(read_file(path), first);
    for (const auto& entry : fs::directory_iterator(path.parent_path())) {
        EXPECT_EQ(entry.path().filename().string().find(".tmp"), std::string::npos);
    }
}

TEST(CampaignFile, MatchesTheGoldenDocument)
{
    const fs::path golden = fs::path(BEAM_TEST_DATA) / "golden_campaign.json";
    const std::string now = campaign_to_json(sample_campaign()).dump(2) + "\n";
    if (std::getenv("BEAM_REGENERATE_GOLDEN") != nullptr) {
        std::ofstream(golden, std::ios::binary) << now;
    }
    ASSERT_TRUE(fs::exists(golden));
    EXPECT_EQ(read_file(golden), now);
    const Campaign loaded = load_campaign(golden);
    EXPECT_TRUE(loaded == sample_campaign());
}

TEST(CampaignFile, ReplayOfALoadedCampaignAgrees)
{
    const Campaign loaded = campaign_from_json(campaign_to_json(sample_campaign()));
    EXPECT_TRUE(replay(loaded, Execution::serial) == loaded);
}

TEST(CampaignFile, RejectsTamperedDocuments)
{
    const Json good = campaign_to_json(sample_campaign());
    const auto fails = [](Json j, ErrorKind kind, const std::string& fragment) {
        return throws_kind([&] { campaign_from_json(j); }, kind, fragment);
    };

    Json over = good;
    over["experiments_used"] = 9;
    EXPECT_TRUE(fails(over, ErrorKind::format, "experiments_used is 9"));

    Json past_budget = good;
    past_budget["settings"]["budget"] = 2;
    EXPECT_TRUE(fails(past_budget, ErrorKind::format, "budget"));

    Json dup = good;
    dup["observations"].push_back(dup["observations"][0]);
    EXPECT_TRUE(fails(dup, ErrorKind::format, ""));

    Json version = good;
    version["version"] = 2;
    EXPECT_TRUE(fails(version, ErrorKind::version, "version"));

    Json wrong_format = good;
    wrong_format["format"] = "something-else";
    EXPECT_TRUE(fails(wrong_format, ErrorKind::format, ""));

    Json values = good;
    values["observations"][0]["values"][0] = 0.7;
    EXPECT_TRUE(fails(values, ErrorKind::format, ""));

    Json missing = good;
    missing.erase("settings");
    EXPECT_TRUE(fails(missing, ErrorKind::format, ""));

    Json outcome = good;
    outcome["observations"][0]["outcome"] = 3;
    EXPECT_TRUE(fails(outcome, ErrorKind::format, ""));
}

TEST(CampaignFile, LoadErrorsNameThePath)
{
    EXPECT_TRUE(throws_kind([] { load_campaign("/nonexistent/beam.json"); }, ErrorKind::io, "/nonexistent/beam.json"));
    const auto path = temp_path("garbage.json");
    std::ofstream(path) << "{ not json";
    EXPECT_TRUE(throws_kind([&] { load_campaign(path); }, ErrorKind::format, path.string()));
}

TEST(CampaignFile, SaveIntoMissingDirectoryIsAnIoError)
{
    EXPECT_TRUE(throws_kind([] { save_campaign(sample_campaign(), "/nonexistent/dir/c.json"); }, ErrorKind::io));
}

TEST(CampaignFile, UnboundedIntervalIsNull)
{
    const Json j = constraint_to_json(IntervalBound{"feed", 0.2, std::numeric_limits<double>::infinity()});
    EXPECT_TRUE(j["max"].is_null());
    EXPECT_EQ(std::get<IntervalBound>(constraint_from_json(j)).max, std::numeric_limits<double>::infinity());
}

TEST(CampaignFile, ConfigurationJsonNamesAxes)
{
    const auto c = sample_campaign();
    const auto j = configuration_json(c.space(), c.space().encode(std::vector<double>{0.5, 300}));
    EXPECT_EQ(j["values"]["feed"], 0.5);
    EXPECT_EQ(j["values"]["speed"], 300.0);
    EXPECT_EQ(j["index"], c.space().encode(std::vector<double>{0.5, 300}).index);
}

TEST(CampaignFile, UtcTimestampShape)
{
    const std::string t = utc_timestamp();
    ASSERT_EQ(t.size(), 20u);
    EXPECT_EQ(t[4], '-');
    EXPECT_EQ(t[10], 'T');
    EXPECT_EQ(t.back(), 'Z');
}
