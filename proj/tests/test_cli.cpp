#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "beam/campaign_file.hpp"
#include "cli.hpp"

using namespace beam;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result beam_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "beam");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("beam-cli-" + std::to_string(::getpid()) + "-" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        file_ = (dir_ / "c.json").string();
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result init(std::vector<std::string> extra = {})
    {
        std::vector<std::string> args{"-c", file_, "init", "--axis", "x:0:9:1", "--axis", "y:0:9:1",
                                      "--budget", "4", "--batch", "2", "--seed", "3"};
        args.insert(args.end(), extra.begin(), extra.end());
        return beam_cli(args);
    }
    Result on_file(std::vector<std::string> args)
    {
        args.insert(args.begin(), {"-c", file_});
        return beam_cli(args);
    }
    std::string write(const std::string& name, const std::string& text)
    {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

    fs::path dir_;
    std::string file_;
};

}  // namespace

TEST_F(CliTest, InitSuggestRecordStatus)
{
    const auto created = init();
    EXPECT_EQ(created.code, cli::ok);
    EXPECT_TRUE(created.err.empty());
    EXPECT_EQ(created.out, "Created " + file_ + ": 2 axes, 100 configurations, budget 4\n");

    const auto first = on_file({"suggest"});
    ASSERT_EQ(first.code, cli::ok) << first.err;
    EXPECT_TRUE(first.err.empty());
    EXPECT_EQ(first.out, on_file({"suggest"}).out);

    const auto batch = load_campaign(file_).pending();
    ASSERT_EQ(batch.size(), 2u);
    const auto rec = on_file({"record", "--index", std::to_string(batch[0].config.index), "--outcome", "success"});
    EXPECT_EQ(rec.code, cli::ok) << rec.err;
    EXPECT_TRUE(rec.err.empty());

    const auto status = on_file({"status"});
    EXPECT_EQ(status.code, cli::ok);
    EXPECT_EQ(status.out,
              "Budget                      4\n"
              "Experiments used            1\n"
              "Discovery rate              1\n"
              "Space size                  100\n"
              "Fraction of explored space  0.01\n"
              "Observations                1 (0 seed, 0 manual)\n"
              "Pending                     1\n"
              "Policy                      nonmyopic\n"
              "Feasible configurations:\n"
              "  index  x  y\n"
              "  " + std::to_string(batch[0].config.index) + "      " + std::to_string(batch[0].config.index / 10) +
                  "  " + std::to_string(batch[0].config.index % 10) + "\n");
}

TEST_F(CliTest, ExitCodes)
{
    ASSERT_EQ(init().code, cli::ok);
    EXPECT_EQ(init().code, cli::conflict);
    EXPECT_EQ(init({"--force"}).code, cli::ok);
    EXPECT_EQ(beam_cli({}).code, cli::usage);
    EXPECT_EQ(beam_cli({"frobnicate"}).code, cli::usage);
    EXPECT_EQ(on_file({"record", "--index", "3"}).code, cli::usage);
    EXPECT_EQ(beam_cli({"-c", (dir_ / "missing.json").string(), "status"}).code, cli::io);
    EXPECT_EQ(on_file({"record", "--index", "3", "--outcome", "1"}).code, cli::invalid_input);
    EXPECT_EQ(on_file({"record", "--values", "0.5,1", "--outcome", "1", "--manual"}).code, cli::invalid_input);
    EXPECT_EQ(on_file({"extend", "--by", "2"}).code, cli::usage);
    EXPECT_EQ(on_file({"extend", "--by", "2", "--yes"}).code, cli::ok);
    EXPECT_EQ(load_campaign(file_).settings().budget, 6);

    std::ofstream(file_, std::ios::trunc) << "{\"format\": \"beam-campaign\", \"version\": 7}";
    EXPECT_EQ(on_file({"status"}).code, cli::file_format);
    std::ofstream(file_, std::ios::trunc) << "garbage";
    EXPECT_EQ(on_file({"status"}).code, cli::file_format);
}

TEST_F(CliTest, BudgetExhaustedAndOverConstrained)
{
    ASSERT_EQ(init({"--force"}).code, cli::ok);
    for (int round = 0; round < 2; ++round) {
        ASSERT_EQ(on_file({"suggest"}).code, cli::ok);
        const auto pending = load_campaign(file_).pending();
        for (const auto& s : pending) {
            ASSERT_EQ(on_file({"record", "--index", std::to_string(s.config.index), "--outcome", "0"}).code, cli::ok);
        }
    }
    const auto done = on_file({"suggest"});
    EXPECT_EQ(done.code, cli::budget_exhausted);
    EXPECT_NE(done.err.find("extend"), std::string::npos);

    const std::string tight = (dir_ / "tight.json").string();
    ASSERT_EQ(beam_cli({"-c", tight, "init", "--axis", "x:0:3:1", "--constraint", "exclude:x:0,1,2,3"}).code,
              cli::ok);
    EXPECT_EQ(beam_cli({"-c", tight, "suggest"}).code, cli::over_constrained);
}

TEST_F(CliTest, MachineFormat)
{
    ASSERT_EQ(init().code, cli::ok);
    const auto s = on_file({"--format", "machine", "suggest"});
    ASSERT_EQ(s.code, cli::ok);
    const Json j = Json::parse(s.out);
    EXPECT_EQ(j["pending"].size(), 2u);
    const auto e = on_file({"--format", "machine", "record", "--index", "99", "--outcome", "1"});
    EXPECT_EQ(e.code, cli::invalid_input);
    const Json err = Json::parse(e.err);
    EXPECT_EQ(err["error"], "not_pending");
    EXPECT_EQ(err["exit_code"], cli::invalid_input);
    EXPECT_TRUE(e.out.empty());
}

TEST_F(CliTest, ImportThirtySevenFailures)
{
    ASSERT_EQ(init().code, cli::ok);
    std::string table = "x,y,outcome\n";
    int rows = 0;
    for (int x = 0; x < 10 && rows < 37; ++x) {
        for (int y = 5; y < 10 && rows < 37; ++y, ++rows) {
            table += std::to_string(x) + "," + std::to_string(y) + ",0\n";
        }
    }
    const auto r = on_file({"import", write("seed.csv", table)});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    const auto c = load_campaign(file_);
    EXPECT_EQ(c.dataset().size(), 37u);
    EXPECT_EQ(c.experiments_used(), 0);

    const auto bad = on_file({"import", write("bad.csv", "x,y,outcome\n1,1,0\n1,abc,0\n2,2,yes\n")});
    EXPECT_EQ(bad.code, cli::invalid_input);
    EXPECT_NE(bad.err.find("line 3"), std::string::npos) << bad.err;
    EXPECT_NE(bad.err.find("line 4"), std::string::npos) << bad.err;
    EXPECT_EQ(load_campaign(file_).dataset().size(), 37u);

    const auto off_grid = on_file({"import", write("off.csv", "x,y,outcome\n1,1.5,0\n")});
    EXPECT_EQ(off_grid.code, cli::invalid_input);
    EXPECT_NE(off_grid.err.find("not on the grid"), std::string::npos) << off_grid.err;
}

TEST_F(CliTest, EnvironmentSuppliesTheCampaignPath)
{
    ASSERT_EQ(init().code, cli::ok);
    ::setenv("BEAM_CAMPAIGN", file_.c_str(), 1);
    const auto r = beam_cli({"status"});
    ::unsetenv("BEAM_CAMPAIGN");
    EXPECT_EQ(r.code, cli::ok) << r.err;
    EXPECT_NE(r.out.find("Budget"), std::string::npos);
}

TEST_F(CliTest, ManualRecordBySetAndSlice)
{
    ASSERT_EQ(init().code, cli::ok);
    const auto r = on_file({"record", "--set", "x=4", "--set", "y=6", "--outcome", "1", "--manual"});
    EXPECT_EQ(r.code, cli::ok) << r.err;
    const auto c = load_campaign(file_);
    EXPECT_EQ(c.experiments_used(), 1);
    EXPECT_EQ(c.dataset()[0].origin, Origin::manual);
    const auto slice = on_file({"--format", "machine", "slice", "--rows", "x", "--cols", "y"});
    ASSERT_EQ(slice.code, cli::ok) << slice.err;
    const Json j = Json::parse(slice.out);
    EXPECT_EQ(j["p"].size(), 10u);
    EXPECT_EQ(j["p"][4][5].get<double>(), (0.05 + 1) / 2);
}

TEST_F(CliTest, SimulateAndBench)
{
    const auto sim = beam_cli({"--format", "machine", "simulate", "--axis", "x:0:19:1", "--axis", "y:0:19:1",
                               "--budget", "6", "--fraction", "0.05", "--seed", "2"});
    ASSERT_EQ(sim.code, cli::ok) << sim.err;
    EXPECT_TRUE(sim.err.empty());

    const auto out_dir = dir_ / "bench";
    const auto bench = beam_cli({"bench", "--axis", "x:0:19:1", "--axis", "y:0:19:1", "--budget", "6", "--reps", "3",
                                 "--fraction", "0.05", "--out-dir", out_dir.string()});
    ASSERT_EQ(bench.code, cli::ok) << bench.err;
    for (const char* f : {"runs.csv", "curves.csv", "report.json"}) {
        EXPECT_TRUE(fs::exists(out_dir / f)) << f;
    }
    const auto again = beam_cli({"bench", "--axis", "x:0:19:1", "--axis", "y:0:19:1", "--budget", "6", "--reps", "3",
                                 "--fraction", "0.05"});
    EXPECT_EQ(again.out, bench.out);
    EXPECT_NE(bench.out.find("nonmyopic"), std::string::npos);
}
