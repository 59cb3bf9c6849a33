// cdsl: one binary over the whole toolchain — parse, verify, translate,
// generate challenges, execute scripts, solve end to end, and benchmark.
//
// Exit codes: 0 success; 1 script diagnostics, runtime errors, or a failed
// solve; 2 usage or configuration problems; 3 I/O or client transport errors.
#include <cstdint>
#include <exception>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdsl/ast_json.hpp"
#include "cdsl/bench.hpp"
#include "cdsl/http_client.hpp"
#include "cdsl/interpreter.hpp"
#include "cdsl/json_util.hpp"
#include "cdsl/mock_client.hpp"
#include "cdsl/parser.hpp"
#include "cdsl/pipeline.hpp"
#include "cdsl/pretty_print.hpp"
#include "cdsl/translator.hpp"
#include "cdsl/verifier.hpp"

namespace {

using namespace cdsl;

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

struct Output {
    std::string format = "text";  // text | json
    std::string out_path;         // optional --out target for the JSON document

    bool json() const { return format == "json"; }

    // Single JSON document on stdout in json mode; human text otherwise.
    // --out always receives the JSON document, whatever the stdout format.
    int deliver(const Json& doc, const std::string& text, int code) const {
        if (!out_path.empty()) write_file_atomic(out_path, to_json_text(doc));
        if (json())
            std::cout << to_json_text(doc);
        else if (!text.empty())
            std::cout << text;
        return code;
    }

    // Failure channel: stderr message plus, in json mode, an error document so
    // stdout still carries exactly one JSON value.
    int fail(const std::string& kind, const std::string& message, int code) const {
        std::cerr << "error: " << message << "\n";
        if (json()) {
            Json doc;
            doc["error"] = Json{{"kind", kind}, {"message", message}};
            std::cout << to_json_text(doc);
        }
        return code;
    }
};

Json parse_diagnostics_to_json(const std::vector<ParseDiagnostic>& diags) {
    Json arr = Json::array();
    for (const ParseDiagnostic& d : diags) {
        Json j;
        j["line"] = d.span.line;
        j["col"] = d.span.col;
        j["message"] = d.message;
        j["expected"] = d.expected;
        j["found"] = d.found;
        arr.push_back(j);
    }
    return arr;
}

std::string parse_diagnostics_text(const std::vector<ParseDiagnostic>& diags) {
    std::string text;
    for (const ParseDiagnostic& d : diags)
        text += "line " + std::to_string(d.span.line) + ": " + d.message + "\n";
    return text;
}

// Loads and parses a script file. On failure prints/bundles diagnostics and
// returns an exit code; on success leaves `script` set.
int load_script(const std::string& path, const Output& out, std::optional<Script>& script) {
    std::string source;
    try {
        source = read_file(path);
    } catch (const std::exception& e) {
        return out.fail("io", e.what(), kIo);
    }
    ParseResult parsed = parse_source(source);
    if (!parsed.script) {
        Json doc;
        doc["valid"] = false;
        doc["diagnostics"] = parse_diagnostics_to_json(parsed.diagnostics);
        std::cerr << parse_diagnostics_text(parsed.diagnostics);
        return out.deliver(doc, "", kDiagnostics);
    }
    script = std::move(parsed.script);
    return kOk;
}

std::string verify_report_text(const VerifyReport& report) {
    if (report.diagnostics.empty()) return "no issues found\n";
    std::string text;
    for (const Diagnostic& d : report.diagnostics)
        text += std::string(diag_code_name(d.code)) + ": " + explain(d) + "\n";
    return text;
}

int cmd_parse(const std::string& file, const Output& out) {
    std::optional<Script> script;
    if (int code = load_script(file, out, script); code != kOk) return code;
    Json doc;
    doc["valid"] = true;
    doc["pretty"] = pretty_print(*script);
    doc["ast"] = ast_to_json(*script);
    return out.deliver(doc, pretty_print(*script), kOk);
}

int cmd_verify(const std::string& file, const Output& out) {
    std::optional<Script> script;
    if (int code = load_script(file, out, script); code != kOk) return code;
    VerifyReport report = verify(*script);
    return out.deliver(report_to_json(report), verify_report_text(report),
                       report.valid ? kOk : kDiagnostics);
}

// Parses + verifies, failing with diagnostics unless the script is valid.
int load_valid_script(const std::string& path, const Output& out, std::optional<Script>& script) {
    if (int code = load_script(path, out, script); code != kOk) return code;
    VerifyReport report = verify(*script);
    if (!report.valid) {
        std::cerr << verify_report_text(report);
        return out.deliver(report_to_json(report), "", kDiagnostics);
    }
    return kOk;
}

int cmd_translate(const std::string& file, const Output& out) {
    std::optional<Script> script;
    if (int code = load_valid_script(file, out, script); code != kOk) return code;
    InstructionList list = translate(*script);
    std::string text = list.preamble + "\n\n";
    for (const Instruction& step : list.steps)
        text += std::to_string(step.index) + ". " + step.text + "\n";
    return out.deliver(instructions_to_json(list), text, kOk);
}

// Reads an optional JSON config file into a BenchConfig; gen/solve reuse the
// generator/client blocks so every subcommand speaks one config dialect.
int load_config(const std::string& path, const Output& out, BenchConfig& cfg) {
    if (path.empty()) return kOk;
    std::string raw;
    try {
        raw = read_file(path);
    } catch (const std::exception& e) {
        return out.fail("io", e.what(), kIo);
    }
    try {
        cfg = bench_config_from_json(Json::parse(raw));
    } catch (const std::exception& e) {
        return out.fail("config", e.what(), kUsage);
    }
    return kOk;
}

Json challenge_to_json(const Challenge& ch, std::uint64_t seed) {
    Json doc;
    doc["id"] = ch.id;
    doc["category"] = ch.category;
    doc["seed"] = seed;
    doc["scene"] = scene_to_json(ch.scene);
    doc["truth"] = truth_to_json(ch.truth);
    doc["reference_script"] = reference_script_text(ch);
    return doc;
}

int cmd_gen(const std::string& category, std::uint64_t seed, const std::string& config_path,
            const Output& out) {
    BenchConfig cfg;
    if (int code = load_config(config_path, out, cfg); code != kOk) return code;
    Challenge ch;
    try {
        ch = make_challenge(category, cfg.generator, seed);
    } catch (const std::exception& e) {
        return out.fail("generator", e.what(), kUsage);
    }
    std::string text = ch.id + ": " + ch.scene.question + "\n\n" + reference_script_text(ch);
    return out.deliver(challenge_to_json(ch, seed), text, kOk);
}

int cmd_exec(const std::string& file, const std::string& scene_path, bool strict,
             const Output& out) {
    std::optional<Script> script;
    if (int code = load_valid_script(file, out, script); code != kOk) return code;

    Scene scene;
    std::optional<GroundTruth> truth;
    try {
        Json doc = Json::parse(read_file(scene_path));
        if (doc.contains("scene")) {  // a gen document: scene plus ground truth
            scene = scene_from_json(doc.at("scene"));
            if (doc.contains("truth")) truth = truth_from_json(doc.at("truth"));
        } else {
            scene = scene_from_json(doc);
        }
    } catch (const std::exception& e) {
        return out.fail("io", e.what(), kIo);
    }

    ExecOptions opts;
    opts.strict = strict;
    ExecutionResult run;
    try {
        run = execute(*script, scene, opts);
    } catch (const RuntimeError& e) {
        Json doc;
        doc["error"] = Json{{"kind", runtime_error_kind_name(e.kind)},
                            {"line", e.span.line},
                            {"message", e.what()}};
        std::cerr << "runtime error on line " << e.span.line << ": " << e.what() << "\n";
        return out.deliver(doc, "", kDiagnostics);
    }

    Json doc;
    doc["answer"] = run.answer ? answer_to_json(*run.answer) : Json(nullptr);
    if (truth && run.answer) {
        bool ok = false;
        try {
            ok = check_answer(scene, *truth, *run.answer);
        } catch (const KindMismatch&) {
        }
        doc["answer_ok"] = ok;
    } else if (truth) {
        doc["answer_ok"] = false;
    }
    doc["trace"] = trace_to_json(run.trace);

    std::string text;
    for (const StepRecord& rec : run.trace)
        text += "step " + std::to_string(rec.step) + " (line " + std::to_string(rec.line) +
                "): " + rec.summary + "\n";
    if (run.answer)
        text += "answer: " + to_json_text(answer_to_json(*run.answer));
    else
        text += "no answer derived\n";
    if (doc.contains("answer_ok"))
        text += std::string("answer_ok: ") + (doc["answer_ok"].get<bool>() ? "true" : "false") +
                "\n";
    return out.deliver(doc, text, kOk);
}

std::unique_ptr<ModelClient> client_from_config(const BenchConfig& cfg, const Challenge& ch) {
    if (cfg.client_kind == "http") {
        HttpClientConfig http;
        http.url = cfg.http_url;
        http.model = cfg.http_model;
        return std::make_unique<HttpClient>(http, cfg.price);
    }
    return std::make_unique<MockClient>(ch, cfg.mock, cfg.price);
}

Json steps_to_json(const std::vector<StepOutcome>& steps) {
    Json arr = Json::array();
    for (const StepOutcome& s : steps) {
        Json j;
        j["index"] = s.index;
        j["line"] = s.line;
        j["instruction"] = s.instruction;
        j["reply"] = s.reply;
        j["judged"] = s.judged;
        j["correct"] = s.correct;
        j["expected"] = s.judged ? Json(s.expected) : Json(nullptr);
        arr.push_back(j);
    }
    return arr;
}

std::string solve_text(const SolveResult& result) {
    std::string text;
    for (const StepOutcome& s : result.steps) {
        text += std::to_string(s.index) + ". " + s.instruction + "\n   reply: " + s.reply + "\n";
        if (s.judged) text += std::string("   judged: ") + (s.correct ? "correct" : "wrong") + "\n";
    }
    const TrialReport& r = result.report;
    text += r.challenge_id + ": " + (r.overall_success ? "solved" : "failed");
    if (r.subtasks_judged)
        text += " (" + std::to_string(r.subtask_successes) + "/" +
                std::to_string(r.subtask_count) + " steps correct)";
    text += "\n";
    return text;
}

int cmd_solve(const std::string& category, std::uint64_t seed, const std::string& config_path,
              bool strict, const Output& out) {
    BenchConfig cfg;
    if (int code = load_config(config_path, out, cfg); code != kOk) return code;
    Challenge ch;
    try {
        ch = make_challenge(category, cfg.generator, seed);
    } catch (const std::exception& e) {
        return out.fail("generator", e.what(), kUsage);
    }
    std::unique_ptr<ModelClient> client = client_from_config(cfg, ch);

    GenerationResult gen;
    try {
        gen = generate_script(ch, default_examples(), *client, cfg.max_retries);
    } catch (const GenerationFailed& e) {
        Json doc;
        doc["error"] = Json{{"kind", "generation_failed"},
                            {"message", e.what()},
                            {"attempts", e.attempts},
                            {"diagnostics", e.last_diagnostics}};
        std::cerr << "generation failed: " << e.what() << "\n";
        for (const std::string& d : e.last_diagnostics) std::cerr << "  " << d << "\n";
        return out.deliver(doc, "", kDiagnostics);
    } catch (const ClientError& e) {
        return out.fail("client", e.what(), kIo);
    }

    SolveOptions opts;
    opts.mode = cfg.mode;
    opts.strict = strict || cfg.strict;
    SolveResult result;
    try {
        result = solve(ch, gen.script, *client, opts);
    } catch (const SolveAborted& e) {
        std::cerr << "client failed mid-solve: " << e.what() << "\n";
        Json doc;
        doc["error"] = Json{{"kind", "client"}, {"message", e.what()}};
        doc["report"] = trial_to_json(e.partial.report);
        doc["steps"] = steps_to_json(e.partial.steps);
        return out.deliver(doc, "", kIo);
    } catch (const ClientError& e) {
        return out.fail("client", e.what(), kIo);
    }
    result.report.challenge_id = ch.id;
    result.report.category = ch.category;
    result.report.script_valid_first_try = gen.first_try_valid;
    result.report.retries = gen.attempts - 1;
    result.report.token_cost = client->usage().input_tokens + client->usage().output_tokens;
    result.report.monetary_cost = client->usage().monetary_cost;

    Json doc;
    doc["report"] = trial_to_json(result.report);
    doc["script"] = gen.script_text;
    doc["answer"] = result.answer ? answer_to_json(*result.answer) : Json(nullptr);
    doc["steps"] = steps_to_json(result.steps);
    return out.deliver(doc, solve_text(result),
                       result.report.overall_success ? kOk : kDiagnostics);
}

// bench --out BASE writes BASE(.json) and the row CSV next to it.
std::string csv_sibling(const std::string& path) {
    const std::string suffix = ".json";
    if (path.size() > suffix.size() &&
        path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return path.substr(0, path.size() - suffix.size()) + ".csv";
    return path + ".csv";
}

int cmd_bench(const std::string& config_path, const Output& out) {
    BenchConfig cfg;
    if (config_path.empty()) return out.fail("config", "bench requires --config", kUsage);
    if (int code = load_config(config_path, out, cfg); code != kOk) return code;

    BenchReport report;
    try {
        report = run_bench(cfg);
    } catch (const ConfigError& e) {
        return out.fail("config", e.what(), kUsage);
    } catch (const ClientError& e) {
        return out.fail("client", e.what(), kIo);
    }

    Json doc = bench_report_to_json(report);
    if (!out.out_path.empty()) {
        write_file_atomic(out.out_path, to_json_text(doc));
        write_file_atomic(csv_sibling(out.out_path), bench_report_csv(report));
    }
    if (out.json())
        std::cout << to_json_text(doc);
    else
        std::cout << bench_summary_table(report);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CAPTCHA DSL toolkit: parse, verify, translate, generate, execute, solve, "
                 "benchmark"};
    app.require_subcommand(1);

    std::string file;
    std::string scene_path;
    std::string category;
    std::string config_path;
    std::uint64_t seed = 1;
    bool strict = false;
    Output out;

    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--format", out.format, "output format")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--out", out.out_path, "write the JSON document to this path");
    };

    CLI::App* parse_cmd = app.add_subcommand("parse", "parse a script and pretty-print it");
    parse_cmd->add_option("file", file, "script file")->required();
    add_output(parse_cmd);

    CLI::App* verify_cmd = app.add_subcommand("verify", "run the static checks on a script");
    verify_cmd->add_option("file", file, "script file")->required();
    add_output(verify_cmd);

    CLI::App* translate_cmd =
        app.add_subcommand("translate", "render a script as numbered solving steps");
    translate_cmd->add_option("file", file, "script file")->required();
    add_output(translate_cmd);

    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a challenge scene with ground truth");
    gen_cmd->add_option("category", category, "bingo | rotation | logical3d")->required();
    gen_cmd->add_option("--seed", seed, "challenge seed");
    gen_cmd->add_option("--config", config_path, "JSON config with a generator block");
    add_output(gen_cmd);

    CLI::App* exec_cmd = app.add_subcommand("exec", "execute a script against a scene");
    exec_cmd->add_option("file", file, "script file")->required();
    exec_cmd->add_option("--scene", scene_path, "scene JSON (bare, or a gen document)")
        ->required();
    exec_cmd->add_flag("--strict", strict, "strict semantics: unknowns and ties raise");
    add_output(exec_cmd);

    CLI::App* solve_cmd =
        app.add_subcommand("solve", "generate a script with a client and solve one challenge");
    solve_cmd->add_option("category", category, "bingo | rotation | logical3d")->required();
    solve_cmd->add_option("--seed", seed, "challenge seed");
    solve_cmd->add_option("--config", config_path, "JSON config with generator/client blocks");
    solve_cmd->add_flag("--strict", strict, "strict interpreter semantics for the oracle");
    add_output(solve_cmd);

    CLI::App* bench_cmd = app.add_subcommand("bench", "run a configured benchmark matrix");
    bench_cmd->add_option("--config", config_path, "bench config JSON")->required();
    add_output(bench_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage message
        return kUsage;
    }

    try {
        if (app.got_subcommand(parse_cmd)) return cmd_parse(file, out);
        if (app.got_subcommand(verify_cmd)) return cmd_verify(file, out);
        if (app.got_subcommand(translate_cmd)) return cmd_translate(file, out);
        if (app.got_subcommand(gen_cmd)) return cmd_gen(category, seed, config_path, out);
        if (app.got_subcommand(exec_cmd)) return cmd_exec(file, scene_path, strict, out);
        if (app.got_subcommand(solve_cmd))
            return cmd_solve(category, seed, config_path, strict, out);
        if (app.got_subcommand(bench_cmd)) return cmd_bench(config_path, out);
    } catch (const std::exception& e) {
        return out.fail("internal", e.what(), kIo);
    }
    return kUsage;
}
