#include "cdsl/bench.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <memory>
#include <thread>

#include "cdsl/http_client.hpp"

namespace cdsl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

const char* known_categories[] = {"bingo", "rotation", "logical3d"};

bool known_category(const std::string& name) {
    for (const char* c : known_categories)
        if (name == c) return true;
    return false;
}

void expect_keys(const Json& j, std::initializer_list<const char*> allowed,
                 const char* where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok)
            throw ConfigError(std::string("unknown ") + where + " key '" + item.key() + "'");
    }
}

template <typename T>
void read_into(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

struct TrialSpec {
    std::string category;
    std::uint64_t seed = 0;
    int repetition = 0;
    std::uint64_t index = 0;
};

TrialReport run_trial(const BenchConfig& cfg, const TrialSpec& spec) {
    const auto started = std::chrono::steady_clock::now();
    Challenge challenge = make_challenge(spec.category, cfg.generator, spec.seed);
    if (cfg.repetitions > 1)
        challenge.id += "-r" + std::to_string(spec.repetition + 1);

    std::unique_ptr<ModelClient> client;
    if (cfg.client_kind == "mock") {
        MockConfig mock = cfg.mock;
        mock.seed = splitmix64(cfg.mock.seed ^ splitmix64(spec.index + 1));
        mock.strict = cfg.strict;
        client = std::make_unique<MockClient>(challenge, mock, cfg.price);
    } else {
        HttpClientConfig http;
        http.url = cfg.http_url;
        http.model = cfg.http_model;
        client = std::make_unique<HttpClient>(http, cfg.price);
    }

    const auto& all_examples = default_examples();
    std::size_t take = std::min<std::size_t>(cfg.examples_per_prompt, all_examples.size());
    std::vector<std::pair<std::string, std::string>> examples(all_examples.begin(),
                                                              all_examples.begin() + take);

    TrialReport report;
    report.challenge_id = challenge.id;
    report.category = spec.category;
    bool first_try = false;
    int retries_used = cfg.max_retries;
    try {
        GenerationResult gen = generate_script(challenge, examples, *client, cfg.max_retries);
        first_try = gen.first_try_valid;
        retries_used = gen.attempts - 1;
        SolveOptions opts;
        opts.mode = cfg.mode;
        opts.strict = cfg.strict;
        try {
            SolveResult solved = solve(challenge, gen.script, *client, opts);
            report = solved.report;
        } catch (const SolveAborted& aborted) {
            report = aborted.partial.report;
        }
    } catch (const GenerationFailed& failed) {
        retries_used = failed.attempts - 1;
    }
    report.challenge_id = challenge.id;
    report.category = spec.category;
    report.script_valid_first_try = first_try;
    report.retries = retries_used;
    report.token_cost = client->usage().input_tokens + client->usage().output_tokens;
    report.monetary_cost = client->usage().monetary_cost;
    report.wall_time_ms =
        cfg.record_wall_time
            ? std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - started)
                  .count()
            : 0;
    return report;
}

CategoryAggregate aggregate(const std::string& name, const std::vector<const TrialReport*>& rows) {
    CategoryAggregate agg;
    agg.category = name;
    agg.trials = static_cast<int>(rows.size());
    long long judged_steps = 0;
    long long judged_hits = 0;
    int judged_trials = 0;
    long long subtask_sum = 0;
    double retries_sum = 0;
    double wall_sum = 0;
    int first_try = 0;
    for (const TrialReport* t : rows) {
        if (t->overall_success) ++agg.solved;
        if (t->script_valid_first_try) ++first_try;
        retries_sum += t->retries;
        wall_sum += static_cast<double>(t->wall_time_ms);
        agg.total_tokens += t->token_cost;
        agg.total_cost += t->monetary_cost;
        if (t->subtasks_judged) {
            ++judged_trials;
            subtask_sum += t->subtask_count;
            judged_steps += t->subtask_count;
            judged_hits += t->subtask_successes;
        }
    }
    if (agg.trials > 0) {
        agg.success_rate = static_cast<double>(agg.solved) / agg.trials;
        agg.first_try_valid_rate = static_cast<double>(first_try) / agg.trials;
        agg.mean_retries = retries_sum / agg.trials;
        agg.mean_wall_time_ms = wall_sum / agg.trials;
    }
    if (judged_trials > 0)
        agg.mean_subtask_count = static_cast<double>(subtask_sum) / judged_trials;
    if (judged_steps > 0)
        agg.per_subtask_success_rate = static_cast<double>(judged_hits) / judged_steps;
    if (agg.solved > 0)
        agg.cost_per_100_solved = agg.total_cost / agg.solved * 100.0;
    return agg;
}

Json aggregate_to_json(const CategoryAggregate& a) {
    Json j;
    j["category"] = a.category;
    j["trials"] = a.trials;
    j["solved"] = a.solved;
    j["success_rate"] = a.success_rate;
    j["mean_subtask_count"] = a.mean_subtask_count;
    j["per_subtask_success_rate"] = a.per_subtask_success_rate;
    j["first_try_valid_rate"] = a.first_try_valid_rate;
    j["mean_retries"] = a.mean_retries;
    j["total_tokens"] = a.total_tokens;
    j["total_cost"] = a.total_cost;
    if (a.cost_per_100_solved)
        j["cost_per_100_solved"] = *a.cost_per_100_solved;
    else
        j["cost_per_100_solved"] = nullptr;
    j["mean_wall_time_ms"] = a.mean_wall_time_ms;
    return j;
}

}  // namespace

BenchConfig bench_config_from_json(const Json& j) {
    BenchConfig cfg;
    expect_keys(j,
                {"categories", "generator", "client", "seeds", "repetitions", "parallelism",
                 "mode", "strict", "max_retries", "examples_per_prompt", "timing"},
                "config");

    if (j.contains("categories")) {
        cfg.categories = j.at("categories").get<std::vector<std::string>>();
        if (cfg.categories.empty()) throw ConfigError("categories must not be empty");
        for (const std::string& c : cfg.categories)
            if (!known_category(c)) throw ConfigError("unknown category '" + c + "'");
    }

    if (j.contains("generator")) {
        const Json& g = j.at("generator");
        expect_keys(g,
                    {"rows", "cols", "colors", "line_length", "adjacent_swap_only",
                     "object_types", "reference_kinds", "degree_step", "shape_vocab",
                     "value_vocab", "n_objects", "templates"},
                    "generator");
        read_into(g, "rows", cfg.generator.rows);
        read_into(g, "cols", cfg.generator.cols);
        read_into(g, "colors", cfg.generator.colors);
        read_into(g, "line_length", cfg.generator.line_length);
        read_into(g, "adjacent_swap_only", cfg.generator.adjacent_swap_only);
        read_into(g, "object_types", cfg.generator.object_types);
        read_into(g, "reference_kinds", cfg.generator.reference_kinds);
        read_into(g, "degree_step", cfg.generator.degree_step);
        read_into(g, "shape_vocab", cfg.generator.shape_vocab);
        read_into(g, "value_vocab", cfg.generator.value_vocab);
        read_into(g, "n_objects", cfg.generator.n_objects);
        if (g.contains("templates")) {
            cfg.generator.templates.clear();
            for (const Json& name : g.at("templates")) {
                try {
                    cfg.generator.templates.push_back(
                        question_template_from_name(name.get<std::string>()));
                } catch (const std::exception&) {
                    throw ConfigError("unknown logical3d template '" +
                                      name.get<std::string>() + "'");
                }
            }
        }
    }

    if (j.contains("client")) {
        const Json& c = j.at("client");
        expect_keys(c,
                    {"kind", "mode", "per_step_success", "invalid_script_prob", "seed", "url",
                     "model", "price"},
                    "client");
        read_into(c, "kind", cfg.client_kind);
        if (cfg.client_kind != "mock" && cfg.client_kind != "http")
            throw ConfigError("unknown client kind '" + cfg.client_kind + "'");
        if (c.contains("mode")) {
            std::string mode = c.at("mode").get<std::string>();
            if (mode == "perfect") cfg.mock.mode = MockMode::perfect;
            else if (mode == "noisy") cfg.mock.mode = MockMode::noisy;
            else if (mode == "scripted_faulty") cfg.mock.mode = MockMode::scripted_faulty;
            else throw ConfigError("unknown mock mode '" + mode + "'");
        }
        read_into(c, "per_step_success", cfg.mock.per_step_success);
        read_into(c, "invalid_script_prob", cfg.mock.invalid_script_prob);
        read_into(c, "seed", cfg.mock.seed);
        read_into(c, "url", cfg.http_url);
        read_into(c, "model", cfg.http_model);
        if (c.contains("price")) cfg.price = price_table_from_json(c.at("price"));
    }

    if (j.contains("seeds")) {
        const Json& s = j.at("seeds");
        expect_keys(s, {"base", "count"}, "seeds");
        read_into(s, "base", cfg.seed_base);
        read_into(s, "count", cfg.seed_count);
    }
    read_into(j, "repetitions", cfg.repetitions);
    read_into(j, "parallelism", cfg.parallelism);
    if (j.contains("mode")) {
        std::string mode = j.at("mode").get<std::string>();
        if (mode == "conversational") cfg.mode = BundleMode::conversational;
        else if (mode == "single_shot") cfg.mode = BundleMode::single_shot;
        else throw ConfigError("unknown solve mode '" + mode + "'");
    }
    read_into(j, "strict", cfg.strict);
    read_into(j, "max_retries", cfg.max_retries);
    read_into(j, "examples_per_prompt", cfg.examples_per_prompt);
    if (j.contains("timing")) {
        std::string timing = j.at("timing").get<std::string>();
        if (timing == "wall") cfg.record_wall_time = true;
        else if (timing == "none") cfg.record_wall_time = false;
        else throw ConfigError("unknown timing mode '" + timing + "'");
    }

    if (cfg.seed_count < 1) throw ConfigError("seeds.count must be at least 1");
    if (cfg.repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (cfg.parallelism < 1) throw ConfigError("parallelism must be at least 1");
    if (cfg.max_retries < 0) throw ConfigError("max_retries must be at least 0");
    if (cfg.examples_per_prompt < 1 ||
        cfg.examples_per_prompt > static_cast<int>(default_examples().size()))
        throw ConfigError("examples_per_prompt must be between 1 and " +
                          std::to_string(default_examples().size()));
    return cfg;
}

Json bench_config_to_json(const BenchConfig& c) {
    Json j;
    j["categories"] = c.categories;
    Json g;
    g["rows"] = c.generator.rows;
    g["cols"] = c.generator.cols;
    g["colors"] = c.generator.colors;
    g["line_length"] = c.generator.line_length;
    g["adjacent_swap_only"] = c.generator.adjacent_swap_only;
    g["object_types"] = c.generator.object_types;
    g["reference_kinds"] = c.generator.reference_kinds;
    g["degree_step"] = c.generator.degree_step;
    g["shape_vocab"] = c.generator.shape_vocab;
    g["value_vocab"] = c.generator.value_vocab;
    g["n_objects"] = c.generator.n_objects;
    Json templates = Json::array();
    for (QuestionTemplate t : c.generator.templates)
        templates.push_back(question_template_name(t));
    g["templates"] = templates;
    j["generator"] = g;
    Json cl;
    cl["kind"] = c.client_kind;
    cl["mode"] = c.mock.mode == MockMode::perfect    ? "perfect"
                 : c.mock.mode == MockMode::noisy    ? "noisy"
                                                     : "scripted_faulty";
    cl["per_step_success"] = c.mock.per_step_success;
    cl["invalid_script_prob"] = c.mock.invalid_script_prob;
    cl["seed"] = c.mock.seed;
    cl["url"] = c.http_url;
    cl["model"] = c.http_model;
    cl["price"] = price_table_to_json(c.price);
    j["client"] = cl;
    j["seeds"] = Json{{"base", c.seed_base}, {"count", c.seed_count}};
    j["repetitions"] = c.repetitions;
    j["parallelism"] = c.parallelism;
    j["mode"] = c.mode == BundleMode::conversational ? "conversational" : "single_shot";
    j["strict"] = c.strict;
    j["max_retries"] = c.max_retries;
    j["examples_per_prompt"] = c.examples_per_prompt;
    j["timing"] = c.record_wall_time ? "wall" : "none";
    return j;
}

BenchReport run_bench(const BenchConfig& config) {
    for (const std::string& c : config.categories)
        if (!known_category(c)) throw ConfigError("unknown category '" + c + "'");
    if (config.client_kind != "mock" && config.client_kind != "http")
        throw ConfigError("unknown client kind '" + config.client_kind + "'");
    if (config.parallelism < 1) throw ConfigError("parallelism must be at least 1");
    if (config.seed_count < 1) throw ConfigError("seeds.count must be at least 1");
    if (config.repetitions < 1) throw ConfigError("repetitions must be at least 1");

    std::vector<TrialSpec> specs;
    std::uint64_t index = 0;
    for (const std::string& category : config.categories)
        for (int s = 0; s < config.seed_count; ++s)
            for (int r = 0; r < config.repetitions; ++r)
                specs.push_back(
                    TrialSpec{category, config.seed_base + static_cast<std::uint64_t>(s), r,
                              index++});

    BenchReport report;
    report.config = config;
    report.trials.resize(specs.size());

    const int threads =
        std::min<int>(config.parallelism, static_cast<int>(specs.size()) > 0
                                              ? static_cast<int>(specs.size())
                                              : 1);
    if (threads <= 1) {
        for (std::size_t i = 0; i < specs.size(); ++i)
            report.trials[i] = run_trial(config, specs[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    while (true) {
                        std::size_t i = next.fetch_add(1);
                        if (i >= specs.size()) return;
                        report.trials[i] = run_trial(config, specs[i]);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                    next.store(specs.size());
                }
            });
        }
        for (std::thread& t : pool) t.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (const std::string& category : config.categories) {
        std::vector<const TrialReport*> rows;
        for (const TrialReport& t : report.trials)
            if (t.category == category) rows.push_back(&t);
        report.aggregates.push_back(aggregate(category, rows));
    }
    std::vector<const TrialReport*> all;
    for (const TrialReport& t : report.trials) all.push_back(&t);
    report.aggregates.push_back(aggregate("all", all));
    return report;
}

Json bench_report_to_json(const BenchReport& report) {
    Json j;
    j["config"] = bench_config_to_json(report.config);
    Json aggs = Json::array();
    for (const CategoryAggregate& a : report.aggregates) aggs.push_back(aggregate_to_json(a));
    j["aggregates"] = aggs;
    Json trials = Json::array();
    for (const TrialReport& t : report.trials) trials.push_back(trial_to_json(t));
    j["trials"] = trials;
    return j;
}

std::string bench_report_csv(const BenchReport& report) {
    std::string out = trial_csv_header() + "\n";
    for (const TrialReport& t : report.trials) out += trial_csv_row(t) + "\n";
    return out;
}

std::string bench_summary_table(const BenchReport& report) {
    std::string out =
        "category    trials  success  first-try  retries  subtasks  per-step     tokens       "
        "cost  cost/100    mean-ms\n";
    for (const CategoryAggregate& a : report.aggregates) {
        char line[256];
        char cost100[32];
        if (a.cost_per_100_solved)
            std::snprintf(cost100, sizeof cost100, "%9.4f", *a.cost_per_100_solved);
        else
            std::snprintf(cost100, sizeof cost100, "%9s", "-");
        std::snprintf(line, sizeof line,
                      "%-11s %6d  %6.1f%%  %8.1f%%  %7.2f  %8.2f  %7.1f%%  %9lld  %9.4f  %s  %9.1f\n",
                      a.category.c_str(), a.trials, a.success_rate * 100,
                      a.first_try_valid_rate * 100, a.mean_retries, a.mean_subtask_count,
                      a.per_subtask_success_rate * 100, a.total_tokens, a.total_cost, cost100,
                      a.mean_wall_time_ms);
        out += line;
    }
    return out;
}

}  // namespace cdsl
