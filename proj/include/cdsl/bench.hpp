// Benchmark harness: seeded trial matrix over categories, parallel execution
// with deterministic ordering, and JSON/CSV/summary reports.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdsl/mock_client.hpp"
#include "cdsl/pipeline.hpp"

namespace cdsl {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct BenchConfig {
    std::vector<std::string> categories = {"bingo", "rotation", "logical3d"};
    GeneratorParams generator;

    std::string client_kind = "mock";  // mock | http
    MockConfig mock;                   // mock.seed is the noise seed base
    std::string http_url;
    std::string http_model;
    PriceTable price;

    std::uint64_t seed_base = 1;
    int seed_count = 10;
    int repetitions = 1;
    int parallelism = 1;
    BundleMode mode = BundleMode::conversational;
    bool strict = false;
    int max_retries = 3;
    int examples_per_prompt = 2;
    // "wall" records measured trial times; "none" zeroes them so reports are
    // byte-reproducible.
    bool record_wall_time = true;
};

// Strict parse: unknown keys, categories, client kinds, modes, or templates
// raise ConfigError.
BenchConfig bench_config_from_json(const Json& j);
Json bench_config_to_json(const BenchConfig& c);  // normalized echo

struct CategoryAggregate {
    std::string category;  // "all" for the overall row
    int trials = 0;
    int solved = 0;
    double success_rate = 0;
    double mean_subtask_count = 0;        // over judged trials
    double per_subtask_success_rate = 0;  // judged successes / judged steps
    double first_try_valid_rate = 0;
    double mean_retries = 0;
    long long total_tokens = 0;
    double total_cost = 0;
    std::optional<double> cost_per_100_solved;  // total cost / solved * 100
    double mean_wall_time_ms = 0;
};

struct BenchReport {
    BenchConfig config;
    std::vector<TrialReport> trials;  // ordered by (category, seed, repetition)
    std::vector<CategoryAggregate> aggregates;
};

// Runs the full matrix: categories x seeds x repetitions. Mock trials carry
// a noise seed derived from (mock.seed, trial index), so identical configs
// reproduce identical reports at any parallelism.
BenchReport run_bench(const BenchConfig& config);

Json bench_report_to_json(const BenchReport& report);
std::string bench_report_csv(const BenchReport& report);
std::string bench_summary_table(const BenchReport& report);

}  // namespace cdsl
