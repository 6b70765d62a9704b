#include "beam/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "beam/error.hpp"
#include "beam/rng.hpp"

namespace beam {

namespace {

constexpr std::uint64_t exhaustive_limit = 2'000'000;
constexpr std::size_t estimate_samples = 200'000;
constexpr std::uint64_t seed_failure_stream = 0x5eedfa11;

double hashed_uniform(std::uint64_t seed, GridIndex index)
{
    return static_cast<double>(mix64(seed ^ mix64(index)) >> 11) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(OracleKind kind)
{
    switch (kind) {
    case OracleKind::clustered: return "clustered";
    case OracleKind::scattered: return "scattered";
    case OracleKind::shell: return "shell";
    }
    return "unknown";
}

OracleKind oracle_kind_from_string(std::string_view text)
{
    if (text == "clustered") {
        return OracleKind::clustered;
    }
    if (text == "scattered") {
        return OracleKind::scattered;
    }
    if (text == "shell") {
        return OracleKind::shell;
    }
    throw Error(ErrorKind::invalid_argument, "unknown oracle kind '" + std::string(text) + "'");
}

SyntheticOracle::SyntheticOracle(const ParameterSpace& space, const OracleSpec& spec) : space_(space), spec_(spec)
{
    if (!(spec.feasible_fraction > 0.0 && spec.feasible_fraction <= 0.05)) {
        throw Error(ErrorKind::invalid_argument, "feasible fraction must be in (0, 0.05]");
    }
    if (spec.kind == OracleKind::clustered && spec.clusters < 1) {
        throw Error(ErrorKind::invalid_argument, "cluster count must be >= 1");
    }
    const double expected = spec.feasible_fraction * static_cast<double>(space.cardinality());
    if (expected < 1.0) {
        throw Error(ErrorKind::invalid_argument,
                    "feasible fraction " + std::to_string(spec.feasible_fraction) + " is unattainable on a grid of " +
                        std::to_string(space.cardinality()) + " points (less than one feasible point)");
    }

    Rng rng(spec.seed);
    const std::size_t d = space.dimensions();
    if (spec.kind == OracleKind::clustered) {
        centers_.assign(static_cast<std::size_t>(spec.clusters), std::vector<double>(d));
        for (auto& c : centers_) {
            for (auto& x : c) {
                x = rng.uniform();
            }
        }
    } else if (spec.kind == OracleKind::shell) {
        centers_.assign(1, std::vector<double>(d));
        for (auto& x : centers_[0]) {
            x = 0.3 + 0.4 * rng.uniform();
        }
        shell_radius_ = 0.15 + 0.15 * rng.uniform();
    }

    exhaustive_ = space.cardinality() <= exhaustive_limit;
    std::vector<double> scores;
    if (exhaustive_) {
        scores.resize(space.cardinality());
        for (GridIndex i = 0; i < space.cardinality(); ++i) {
            scores[i] = score(i);
        }
    } else {
        Rng sampler(derive_seed(spec.seed, 1));
        scores.resize(estimate_samples);
        for (auto& s : scores) {
            s = score(sampler.below(space.cardinality()));
        }
    }
    std::sort(scores.begin(), scores.end());

    if (spec.kind == OracleKind::scattered) {
        threshold_ = spec.feasible_fraction;
    } else {
        const double target = spec.feasible_fraction * static_cast<double>(scores.size());
        if (target < 1.0) {
            throw Error(ErrorKind::invalid_argument, "feasible fraction is too small to tune on a sample of " +
                                                         std::to_string(scores.size()) + " points");
        }
        // The count at threshold s[j] is upper_bound(s[j]); take whichever of
        // the two order statistics around the target lands closest.
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t j : {static_cast<std::size_t>(std::floor(target)) - 1,
                              std::min(scores.size(), static_cast<std::size_t>(std::ceil(target))) - 1}) {
            const auto count = std::upper_bound(scores.begin(), scores.end(), scores[j]) - scores.begin();
            const double gap = std::abs(static_cast<double>(count) - target);
            if (gap < best_gap) {
                best_gap = gap;
                threshold_ = scores[j];
            }
        }
        radius_ = spec.kind == OracleKind::clustered ? std::sqrt(threshold_) : threshold_;
    }
    const auto feasible = std::upper_bound(scores.begin(), scores.end(), threshold_) - scores.begin();
    if (spec.kind == OracleKind::scattered) {
        std::size_t count = 0;
        for (double s : scores) {
            count += s < threshold_ ? 1 : 0;
        }
        realized_fraction_ = static_cast<double>(count) / static_cast<double>(scores.size());
    } else {
        realized_fraction_ = static_cast<double>(feasible) / static_cast<double>(scores.size());
    }
}

double SyntheticOracle::score(GridIndex index) const
{
    if (spec_.kind == OracleKind::scattered) {
        return hashed_uniform(spec_.seed, index);
    }
    const std::size_t d = space_.dimensions();
    double unit[64];
    std::vector<double> heap;
    double* u = unit;
    if (d > 64) {
        heap.resize(d);
        u = heap.data();
    }
    space_.normalize_index(index, {u, d});
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers_) {
        double d2 = 0;
        for (std::size_t a = 0; a < d; ++a) {
            const double diff = u[a] - c[a];
            d2 += diff * diff;
        }
        best = std::min(best, d2);
    }
    if (spec_.kind == OracleKind::shell) {
        return std::abs(std::sqrt(best) - shell_radius_);
    }
    return best;
}

bool SyntheticOracle::operator()(GridIndex index) const
{
    if (spec_.kind == OracleKind::scattered) {
        return score(index) < threshold_;
    }
    return score(index) <= threshold_;
}

std::vector<GridIndex> SyntheticOracle::feasible_set() const
{
    return enumerate_indices(space_, [&](GridIndex i) { return (*this)(i); });
}

std::vector<Configuration> sample_infeasible(const ParameterSpace& space, const SyntheticOracle& oracle, int n,
                                             std::uint64_t seed)
{
    if (n < 0) {
        throw Error(ErrorKind::invalid_argument, "sample size must be >= 0");
    }
    Rng rng(seed);
    std::unordered_set<GridIndex> seen;
    std::vector<Configuration> out;
    const std::uint64_t attempts = 1000 * static_cast<std::uint64_t>(n) + 10000;
    for (std::uint64_t a = 0; a < attempts && out.size() < static_cast<std::size_t>(n); ++a) {
        const GridIndex i = rng.below(space.cardinality());
        if (!oracle(i) && seen.insert(i).second) {
            out.push_back(space.decode(i));
        }
    }
    if (out.size() < static_cast<std::size_t>(n)) {
        throw Error(ErrorKind::invalid_argument,
                    "could not draw " + std::to_string(n) + " distinct infeasible points from the grid");
    }
    return out;
}

SimulationTrace run_simulated_campaign(const ParameterSpace& space, const std::vector<Constraint>& constraints,
                                       const SyntheticOracle& oracle, const SimulationSettings& settings)
{
    const auto start = std::chrono::steady_clock::now();
    CampaignSettings cs;
    cs.budget = settings.budget;
    cs.batch_size = settings.batch_size;
    cs.policy = settings.policy;
    cs.surrogate = settings.surrogate;
    cs.pool = settings.pool;
    cs.seed = settings.seed;
    Campaign campaign(space, constraints, cs);

    if (settings.seed_failures > 0) {
        std::vector<SeedRecord> rows;
        for (const auto& c : sample_infeasible(space, oracle, settings.seed_failures,
                                               derive_seed(settings.seed, seed_failure_stream))) {
            rows.push_back({c.values, Outcome::failure});
        }
        campaign.import_seed_data(rows);
    }

    SimulationTrace trace;
    while (!campaign.complete()) {
        const std::vector<PendingSuggestion> batch = campaign.suggest(settings.execution);
        for (const auto& s : batch) {
            const Outcome y = oracle.evaluate(s.config.index);
            campaign.record(s.config.index, y);
            trace.discoveries += y == Outcome::success ? 1 : 0;
            trace.experiments.push_back(s.config.index);
            trace.cumulative.push_back(trace.discoveries);
        }
    }
    trace.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return trace;
}

BenchReport run_bench(const BenchConfig& config, Execution execution)
{
    if (config.repetitions < 1) {
        throw Error(ErrorKind::invalid_argument, "repetitions must be >= 1");
    }
    if (config.oracles.empty() || config.strategies.empty()) {
        throw Error(ErrorKind::invalid_argument, "bench needs at least one oracle and one strategy");
    }
    const std::size_t n_oracles = config.oracles.size();
    const std::size_t n_strategies = config.strategies.size();
    const auto reps = static_cast<std::size_t>(config.repetitions);

    std::vector<SyntheticOracle> oracles;
    oracles.reserve(n_oracles * reps);
    for (std::size_t o = 0; o < n_oracles; ++o) {
        for (std::size_t r = 0; r < reps; ++r) {
            OracleSpec spec = config.oracles[o];
            spec.seed = derive_seed(spec.seed, r);
            oracles.emplace_back(config.space, spec);
        }
    }

    BenchReport report;
    report.runs.resize(n_oracles * n_strategies * reps);
    for (std::size_t o = 0; o < n_oracles; ++o) {
        for (std::size_t s = 0; s < n_strategies; ++s) {
            for (std::size_t r = 0; r < reps; ++r) {
                BenchRun& run = report.runs[(o * n_strategies + s) * reps + r];
                run.oracle = o;
                run.oracle_kind = config.oracles[o].kind;
                run.strategy = config.strategies[s];
                run.repetition = static_cast<int>(r);
                run.seed = derive_seed(config.seed, r);
                run.budget = config.budget;
                run.batch_size = config.batch_size;
            }
        }
    }

    const auto total = static_cast<std::ptrdiff_t>(report.runs.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) if (execution == Execution::parallel)
    for (std::ptrdiff_t i = 0; i < total; ++i) {
        BenchRun& run = report.runs[static_cast<std::size_t>(i)];
        try {
            SimulationSettings sim;
            sim.policy = run.strategy;
            sim.budget = config.budget;
            sim.batch_size = config.batch_size;
            sim.surrogate = config.surrogate;
            sim.pool = config.pool;
            sim.seed = run.seed;
            sim.seed_failures = config.seed_failures;
            sim.execution = Execution::serial;
            const auto trace = run_simulated_campaign(
                config.space, config.constraints, oracles[run.oracle * reps + static_cast<std::size_t>(run.repetition)],
                sim);
            run.discoveries = trace.discoveries;
            run.experiments = static_cast<int>(trace.experiments.size());
            run.wall_ms = trace.wall_ms;
            run.cumulative = trace.cumulative;
        } catch (...) {
#pragma omp critical(beam_bench_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (std::size_t o = 0; o < n_oracles; ++o) {
        for (std::size_t s = 0; s < n_strategies; ++s) {
            BenchAggregate agg;
            agg.oracle = o;
            agg.oracle_kind = config.oracles[o].kind;
            agg.strategy = config.strategies[s];
            agg.runs = config.repetitions;
            const auto first = report.runs.begin() + static_cast<std::ptrdiff_t>((o * n_strategies + s) * reps);
            const auto last = first + static_cast<std::ptrdiff_t>(reps);
            double sum = 0;
            agg.min = first->discoveries;
            agg.max = first->discoveries;
            for (auto it = first; it != last; ++it) {
                sum += it->discoveries;
                agg.min = std::min(agg.min, it->discoveries);
                agg.max = std::max(agg.max, it->discoveries);
            }
            agg.mean = sum / static_cast<double>(reps);
            double ss = 0;
            for (auto it = first; it != last; ++it) {
                ss += (it->discoveries - agg.mean) * (it->discoveries - agg.mean);
            }
            agg.stddev = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1)) : 0.0;
            report.aggregates.push_back(agg);
        }
    }
    return report;
}

void write_runs_csv(const BenchReport& report, std::ostream& out)
{
    out << "strategy,oracle,oracle_kind,repetition,seed,T,B,discoveries,experiments,wall_ms\n";
    for (const auto& r : report.runs) {
        out << to_string(r.strategy) << ',' << r.oracle << ',' << to_string(r.oracle_kind) << ',' << r.repetition
            << ',' << r.seed << ',' << r.budget << ',' << r.batch_size << ',' << r.discoveries << ','
            << r.experiments << ',' << r.wall_ms << '\n';
    }
}

void write_curves_csv(const BenchReport& report, std::ostream& out)
{
    out << "strategy,oracle,oracle_kind,repetition,experiment,discoveries\n";
    for (const auto& r : report.runs) {
        for (std::size_t e = 0; e < r.cumulative.size(); ++e) {
            out << to_string(r.strategy) << ',' << r.oracle << ',' << to_string(r.oracle_kind) << ','
                << r.repetition << ',' << e + 1 << ',' << r.cumulative[e] << '\n';
        }
    }
}

Json bench_json(const BenchReport& report)
{
    Json aggregates = Json::array();
    for (const auto& a : report.aggregates) {
        aggregates.push_back(Json{{"strategy", std::string(to_string(a.strategy))},
                                  {"oracle", a.oracle},
                                  {"oracle_kind", std::string(to_string(a.oracle_kind))},
                                  {"runs", a.runs},
                                  {"mean_discoveries", a.mean},
                                  {"stddev_discoveries", a.stddev},
                                  {"min_discoveries", a.min},
                                  {"max_discoveries", a.max}});
    }
    Json runs = Json::array();
    for (const auto& r : report.runs) {
        runs.push_back(Json{{"strategy", std::string(to_string(r.strategy))},
                            {"oracle", r.oracle},
                            {"oracle_kind", std::string(to_string(r.oracle_kind))},
                            {"repetition", r.repetition},
                            {"seed", r.seed},
                            {"T", r.budget},
                            {"B", r.batch_size},
                            {"discoveries", r.discoveries},
                            {"experiments", r.experiments},
                            {"cumulative", r.cumulative}});
    }
    return Json{{"aggregates", aggregates}, {"runs", runs}};
}

}  // namespace beam
