#pragma once

#include <cstdint>
#include <ostream>
#include <string_view>
#include <vector>

#include "beam/campaign.hpp"
#include "beam/campaign_file.hpp"

namespace beam {

enum class OracleKind { clustered, scattered, shell };

std::string_view to_string(OracleKind kind);
OracleKind oracle_kind_from_string(std::string_view text);

struct OracleSpec {
    OracleKind kind = OracleKind::clustered;
    double feasible_fraction = 0.005;  // (0, 0.05]
    int clusters = 3;
    std::uint64_t seed = 0;
};

/// Synthetic feasibility landscape over a grid, in normalized coordinates.
///
/// clustered: `clusters` uniformly placed centers; feasible within `radius`
///   of the nearest one.
/// shell: feasible within `radius` of a sphere around one center (a thin
///   annulus, hard for distance-based models).
/// scattered: independent hashed coin flips, no spatial structure.
///
/// The radius (shell: half-width) is tuned so the feasible share of the grid,
/// or of a 200k-point uniform sample on larger grids, is as close to the
/// requested fraction as the grid allows.
class SyntheticOracle {
public:
    SyntheticOracle(const ParameterSpace& space, const OracleSpec& spec);

    const OracleSpec& spec() const noexcept { return spec_; }
    const std::vector<std::vector<double>>& centers() const noexcept { return centers_; }
    double radius() const noexcept { return radius_; }
    double shell_radius() const noexcept { return shell_radius_; }
    double realized_fraction() const noexcept { return realized_fraction_; }
    bool exhaustive_estimate() const noexcept { return exhaustive_; }

    bool operator()(GridIndex index) const;
    Outcome evaluate(GridIndex index) const { return (*this)(index) ? Outcome::success : Outcome::failure; }

    /// Every feasible index, ascending. Enumerates the whole grid.
    std::vector<GridIndex> feasible_set() const;

private:
    double score(GridIndex index) const;  // feasible iff score <= threshold_

    ParameterSpace space_;
    OracleSpec spec_;
    std::vector<std::vector<double>> centers_;
    double radius_ = 0;
    double shell_radius_ = 0;
    double threshold_ = 0;
    double realized_fraction_ = 0;
    bool exhaustive_ = false;
};

/// `n` distinct infeasible grid points drawn uniformly (rejection sampling).
std::vector<Configuration> sample_infeasible(const ParameterSpace& space, const SyntheticOracle& oracle, int n,
                                             std::uint64_t seed);

struct SimulationSettings {
    Policy policy = Policy::nonmyopic;
    int budget = 10;
    int batch_size = 2;
    SurrogateSettings surrogate;
    PoolSettings pool;
    std::uint64_t seed = 0;
    int seed_failures = 0;  // imported before the first suggestion, budget-free
    Execution execution = Execution::serial;
};

struct SimulationTrace {
    std::vector<GridIndex> experiments;  // in the order they were recorded
    std::vector<int> cumulative;         // discoveries after each experiment
    int discoveries = 0;
    double wall_ms = 0;
};

/// Drives a Campaign against the oracle: suggest, evaluate, record, until the
/// budget is spent.
SimulationTrace run_simulated_campaign(const ParameterSpace& space, const std::vector<Constraint>& constraints,
                                       const SyntheticOracle& oracle, const SimulationSettings& settings);

struct BenchConfig {
    ParameterSpace space{std::vector<AxisSpec>{AxisSpec("x", 0, 1, 1)}};
    std::vector<Constraint> constraints;
    std::vector<OracleSpec> oracles;
    std::vector<Policy> strategies{Policy::nonmyopic, Policy::greedy, Policy::random};
    int budget = 50;
    int batch_size = 2;
    int repetitions = 20;
    int seed_failures = 0;
    SurrogateSettings surrogate;
    PoolSettings pool;
    std::uint64_t seed = 0;
};

struct BenchRun {
    std::size_t oracle = 0;  // position in BenchConfig::oracles
    OracleKind oracle_kind = OracleKind::clustered;
    Policy strategy = Policy::nonmyopic;
    int repetition = 0;
    std::uint64_t seed = 0;
    int budget = 0;
    int batch_size = 0;
    int discoveries = 0;
    int experiments = 0;
    double wall_ms = 0;
    std::vector<int> cumulative;
};

struct BenchAggregate {
    std::size_t oracle = 0;
    OracleKind oracle_kind = OracleKind::clustered;
    Policy strategy = Policy::nonmyopic;
    int runs = 0;
    double mean = 0;
    double stddev = 0;  // sample standard deviation
    int min = 0;
    int max = 0;
};

struct BenchReport {
    std::vector<BenchRun> runs;              // oracle, strategy, repetition order
    std::vector<BenchAggregate> aggregates;  // oracle, strategy order
};

/// Repetition r uses oracle seed derive_seed(spec.seed, r) and campaign seed
/// derive_seed(config.seed, r) for every strategy, so strategies are compared
/// on paired instances. Runs execute in parallel under `execution`.
BenchReport run_bench(const BenchConfig& config, Execution execution = Execution::parallel);

void write_runs_csv(const BenchReport& report, std::ostream& out);
void write_curves_csv(const BenchReport& report, std::ostream& out);
Json bench_json(const BenchReport& report);

}  // namespace beam
