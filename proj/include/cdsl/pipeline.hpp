// End-to-end orchestration: build a challenge, prompt a client for a script,
// run the verifier feedback loop, translate, solve step by step, and judge the
// replies against the deterministic oracle.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cdsl/ast.hpp"
#include "cdsl/client.hpp"
#include "cdsl/generators.hpp"
#include "cdsl/interpreter.hpp"
#include "cdsl/scene.hpp"
#include "cdsl/translator.hpp"

namespace cdsl {

struct Challenge {
    std::string id;
    std::string category;  // bingo | rotation | logical3d
    Scene scene;
    GroundTruth truth;
};

// Scene-generator knobs, shared across categories. Defaults match the stock
// test corpus: a 5x5 three-color board with 4-long lines, 45-degree rotation
// steps, and six-object relational scenes.
struct GeneratorParams {
    int rows = 5;
    int cols = 5;
    std::vector<std::string> colors = {"red", "blue", "green"};
    int line_length = 4;
    bool adjacent_swap_only = false;

    std::vector<std::string> object_types = {"clock hand", "arrow", "animal"};
    std::vector<std::string> reference_kinds = {"compass"};
    int degree_step = 45;

    std::vector<std::string> shape_vocab = {"cube", "sphere", "cone"};
    std::vector<std::string> value_vocab = {"0", "W", "A", "7"};
    int n_objects = 6;
    // logical3d question templates cycled by seed
    std::vector<QuestionTemplate> templates = {QuestionTemplate::same_orientation,
                                               QuestionTemplate::left_of_larger,
                                               QuestionTemplate::color_shape};
};

// Deterministic in (category, params, seed). Throws std::invalid_argument on
// an unknown category name.
Challenge make_challenge(const std::string& category, const GeneratorParams& params,
                         std::uint64_t seed);

// A straight-line script that solves `challenge`, instantiated from the scene
// metadata. This is what a cooperative model is expected to produce: the mock
// client emits it on generation, and its translation defines the instruction
// sequence the mock's solve-time oracle follows.
std::string reference_script_text(const Challenge& challenge);

// Two worked (task description, script) example pairs for generation prompts.
const std::vector<std::pair<std::string, std::string>>& default_examples();

// ---- script generation with the verifier feedback loop ----

struct GenerationResult {
    Script script;
    std::string script_text;
    int attempts = 1;  // client calls made, 1 when the first script was valid
    bool first_try_valid = true;
};

class GenerationFailed : public std::runtime_error {
public:
    GenerationFailed(const std::string& what, std::vector<std::string> diagnostics, int attempts)
        : std::runtime_error(what), last_diagnostics(std::move(diagnostics)), attempts(attempts) {}
    std::vector<std::string> last_diagnostics;  // parse/verify explanations, last attempt
    int attempts;
};

// Prompts `client` for a script solving `challenge`; on parse or verify
// errors, appends the explanations to the conversation and retries. Issues at
// most max_retries + 1 client calls; throws GenerationFailed after the last
// invalid attempt. Requires max_retries >= 0 and at least one example.
GenerationResult generate_script(const Challenge& challenge,
                                 const std::vector<std::pair<std::string, std::string>>& examples,
                                 ModelClient& client, int max_retries = 3);

// ---- solving ----

struct StepOutcome {
    int index = 0;  // instruction index, 1-based
    int line = 0;   // script line the instruction renders
    std::string instruction;
    std::string reply;     // raw client text
    bool judged = false;   // an oracle value existed for this step
    bool correct = false;  // judged and the reply matched it
    std::string expected;  // oracle value rendering, when judged
};

struct TrialReport {
    std::string challenge_id;
    std::string category;
    bool script_valid_first_try = true;
    int retries = 0;  // generation retries consumed (attempts - 1)
    bool subtasks_judged = false;
    int subtask_count = 0;  // judged steps only
    int subtask_successes = 0;
    bool overall_success = false;
    long long wall_time_ms = 0;
    long long token_cost = 0;  // input + output tokens across the trial
    double monetary_cost = 0;
};

Json trial_to_json(const TrialReport& t);
std::string trial_csv_header();
std::string trial_csv_row(const TrialReport& t);

struct SolveResult {
    std::optional<Answer> answer;
    TrialReport report;
    std::vector<StepOutcome> steps;
};

struct SolveOptions {
    BundleMode mode = BundleMode::conversational;
    bool strict = false;
    // Judge each reply against the interpreter's trace. Off, subtask fields
    // stay null (no symbolic oracle, e.g. image-only challenges).
    bool judge_with_oracle = true;
};

// Raised when the client fails mid-solve; carries what was scored so far.
class SolveAborted : public ClientError {
public:
    SolveAborted(const std::string& what, SolveResult partial)
        : ClientError(what), partial(std::move(partial)) {}
    SolveResult partial;
};

// Translates the verified script, sends one message per instruction
// (conversational) or a single bundled message, parses replies tolerantly,
// and assembles the final Answer from the terminal action step's reply.
// Wrong steps are never corrected mid-solve. Requires verify(script).valid.
SolveResult solve(const Challenge& challenge, const Script& script, ModelClient& client,
                  const SolveOptions& opts = {});

// ---- reply grammar (shared by solve's judge and the mock client) ----

// Oracle value for each instruction: the typed result of the last trace
// record on the instruction's source line, if any.
std::vector<std::optional<Value>> oracle_values(const InstructionList& instructions,
                                                const ExecutionResult& execution);

// Concise reply rendering of an oracle value: ids joined by commas,
// "(row, col)", "N degrees", true/false/unknown, bare numbers and words.
std::string reply_render(const Value& v);

// Tolerant match: scans `reply` for the last structured fragment of the
// expected value's shape — "(row, col)", "N degrees", a truth word, a number,
// scene object ids, or a quoted/bare word — and compares it to `expected`.
bool reply_matches(const std::string& reply, const Value& expected, const Scene& scene);

}  // namespace cdsl
