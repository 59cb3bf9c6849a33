#include "cdsl/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <set>

#include "cdsl/parser.hpp"
#include "cdsl/verifier.hpp"

namespace cdsl {

namespace {

std::string fmt_num(double value) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

// ---- reply fragment scanning ----

struct Fragments {
    std::vector<GridPos> positions;
    std::vector<double> degrees;
    std::vector<Truth> truths;
    std::vector<long long> numbers;  // integer tokens outside positions/degrees
    std::vector<std::string> words;
};

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Left-to-right scan for the structured fragments replies may contain:
// "(row, col)" pairs, "N degrees", truth words, bare integers, and
// identifier-shaped words. Digits inside words stay part of the word.
Fragments scan_reply(const std::string& text) {
    Fragments out;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto parse_int = [&](std::size_t& pos) -> std::optional<long long> {
        std::size_t p = pos;
        bool neg = p < n && text[p] == '-';
        if (neg) ++p;
        std::size_t start = p;
        while (p < n && std::isdigit(static_cast<unsigned char>(text[p]))) ++p;
        if (p == start) return std::nullopt;
        pos = p;
        long long v = std::stoll(text.substr(start, p - start));
        return neg ? -v : v;
    };
    auto skip_ws = [&](std::size_t p) {
        while (p < n && (text[p] == ' ' || text[p] == '\t')) ++p;
        return p;
    };

    while (i < n) {
        char c = text[i];
        if (c == '(') {
            std::size_t p = skip_ws(i + 1);
            std::optional<long long> row = parse_int(p);
            p = skip_ws(p);
            if (row && p < n && text[p] == ',') {
                p = skip_ws(p + 1);
                std::optional<long long> col = parse_int(p);
                p = skip_ws(p);
                if (col && p < n && text[p] == ')') {
                    out.positions.push_back(
                        GridPos{static_cast<int>(*row), static_cast<int>(*col)});
                    i = p + 1;
                    continue;
                }
            }
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t p = i;
            bool neg = text[p] == '-';
            if (neg) ++p;
            std::size_t start = p;
            // a '.' joins the number only when a digit follows: "2.5" is a
            // decimal, "is 2." is an integer ending a sentence
            while (p < n &&
                   (std::isdigit(static_cast<unsigned char>(text[p])) ||
                    (text[p] == '.' && p + 1 < n &&
                     std::isdigit(static_cast<unsigned char>(text[p + 1])))))
                ++p;
            std::string digits = text.substr(start, p - start);
            std::size_t w = skip_ws(p);
            std::size_t wend = w;
            while (wend < n && word_char(text[wend])) ++wend;
            if (lower(text.substr(w, wend - w)) == "degrees") {
                double v = std::stod(digits);
                out.degrees.push_back(neg ? -v : v);
                i = wend;
                continue;
            }
            if (digits.find('.') == std::string::npos) {
                long long v = std::stoll(digits);
                out.numbers.push_back(neg ? -v : v);
            }
            i = p;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t p = i;
            while (p < n && word_char(text[p])) ++p;
            std::string word = text.substr(i, p - i);
            std::string low = lower(word);
            if (low == "true") out.truths.push_back(Truth::true_);
            else if (low == "false") out.truths.push_back(Truth::false_);
            else if (low == "unknown") out.truths.push_back(Truth::unknown);
            else out.words.push_back(std::move(word));
            i = p;
            continue;
        }
        ++i;
    }
    return out;
}

std::set<std::string> scene_ids(const Scene& scene) {
    std::set<std::string> ids;
    for (const SceneObject& obj : scene.objects) ids.insert(obj.id);
    return ids;
}

bool has_word(const Fragments& frag, const std::string& want) {
    std::string low = lower(want);
    for (const std::string& w : frag.words)
        if (lower(w) == low) return true;
    for (long long n : frag.numbers)
        if (std::to_string(n) == want) return true;
    return false;
}

bool scalar_present(const Fragments& frag, const Scalar& s) {
    if (const long long* n = std::get_if<long long>(&s))
        return std::find(frag.numbers.begin(), frag.numbers.end(), *n) != frag.numbers.end();
    if (const std::string* str = std::get_if<std::string>(&s)) return has_word(frag, *str);
    if (const Orientation* o = std::get_if<Orientation>(&s)) {
        for (double d : frag.degrees)
            if (degree_distance(normalized(d).degrees, o->degrees) <= 1e-6) return true;
        return false;
    }
    if (const GridPos* p = std::get_if<GridPos>(&s))
        return std::find(frag.positions.begin(), frag.positions.end(), *p) !=
               frag.positions.end();
    const Truth t = std::get<Truth>(s);
    return std::find(frag.truths.begin(), frag.truths.end(), t) != frag.truths.end();
}

std::string scalar_render(const Scalar& s) {
    if (const long long* n = std::get_if<long long>(&s)) return std::to_string(*n);
    if (const std::string* str = std::get_if<std::string>(&s)) return *str;
    if (const Orientation* o = std::get_if<Orientation>(&s))
        return fmt_num(o->degrees) + " degrees";
    if (const GridPos* p = std::get_if<GridPos>(&s))
        return "(" + std::to_string(p->row) + ", " + std::to_string(p->col) + ")";
    return truth_name(std::get<Truth>(s));
}

}  // namespace

std::string reply_render(const Value& v) {
    if (const ObjectSet* set = std::get_if<ObjectSet>(&v)) {
        if (set->ids.empty()) return "none";
        std::string out;
        for (std::size_t i = 0; i < set->ids.size(); ++i)
            out += (i ? ", " : "") + set->ids[i];
        return out;
    }
    if (const ObjectRef* ref = std::get_if<ObjectRef>(&v)) return ref->id;
    if (const Truth* t = std::get_if<Truth>(&v)) return truth_name(*t);
    if (const Orientation* o = std::get_if<Orientation>(&v))
        return fmt_num(o->degrees) + " degrees";
    if (const long long* n = std::get_if<long long>(&v)) return std::to_string(*n);
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    if (const GridPos* p = std::get_if<GridPos>(&v))
        return "(" + std::to_string(p->row) + ", " + std::to_string(p->col) + ")";
    const ListValue& list = std::get<ListValue>(v);
    if (list.items.empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < list.items.size(); ++i)
        out += (i ? ", " : "") + scalar_render(list.items[i]);
    return out;
}

bool reply_matches(const std::string& reply, const Value& expected, const Scene& scene) {
    Fragments frag = scan_reply(reply);
    if (const ObjectSet* set = std::get_if<ObjectSet>(&expected)) {
        std::set<std::string> known = scene_ids(scene);
        std::set<std::string> mentioned;
        for (const std::string& w : frag.words)
            if (known.count(w)) mentioned.insert(w);
        std::set<std::string> want(set->ids.begin(), set->ids.end());
        return mentioned == want;
    }
    if (const ObjectRef* ref = std::get_if<ObjectRef>(&expected)) {
        std::set<std::string> known = scene_ids(scene);
        std::set<std::string> mentioned;
        for (const std::string& w : frag.words)
            if (known.count(w)) mentioned.insert(w);
        return mentioned == std::set<std::string>{ref->id};
    }
    if (const Truth* t = std::get_if<Truth>(&expected))
        return !frag.truths.empty() && frag.truths.back() == *t;
    if (const Orientation* o = std::get_if<Orientation>(&expected))
        return !frag.degrees.empty() &&
               degree_distance(normalized(frag.degrees.back()).degrees, o->degrees) <= 1e-6;
    if (const long long* n = std::get_if<long long>(&expected))
        return !frag.numbers.empty() && frag.numbers.back() == *n;
    if (const std::string* s = std::get_if<std::string>(&expected)) return has_word(frag, *s);
    if (const GridPos* p = std::get_if<GridPos>(&expected))
        return !frag.positions.empty() && frag.positions.back() == *p;
    const ListValue& list = std::get<ListValue>(expected);
    for (const Scalar& item : list.items)
        if (!scalar_present(frag, item)) return false;
    return true;
}

std::vector<std::optional<Value>> oracle_values(const InstructionList& instructions,
                                                const ExecutionResult& execution) {
    std::vector<std::optional<Value>> out;
    out.reserve(instructions.steps.size());
    for (const Instruction& step : instructions.steps) {
        std::optional<Value> found;
        for (const StepRecord& rec : execution.trace)
            if (rec.line == step.line && rec.value) found = rec.value;
        out.push_back(std::move(found));
    }
    return out;
}

// ---- challenges ----

Challenge make_challenge(const std::string& category, const GeneratorParams& params,
                         std::uint64_t seed) {
    Challenge ch;
    ch.category = category;
    ch.id = category + "-" + std::to_string(seed);
    if (category == "bingo") {
        auto [scene, truth] = gen_bingo(params.rows, params.cols, params.colors,
                                        params.line_length, params.adjacent_swap_only, seed);
        ch.scene = std::move(scene);
        ch.truth = truth;
        return ch;
    }
    if (category == "rotation") {
        auto [scene, truth] = gen_rotation(params.object_types, params.reference_kinds,
                                           params.degree_step, seed);
        ch.scene = std::move(scene);
        ch.truth = truth;
        return ch;
    }
    if (category == "logical3d") {
        if (params.templates.empty())
            throw std::invalid_argument("logical3d challenges need at least one template");
        QuestionTemplate tmpl = params.templates[seed % params.templates.size()];
        auto [scene, truth] = gen_logical3d(params.shape_vocab, params.colors,
                                            params.value_vocab, params.n_objects, tmpl, seed);
        ch.scene = std::move(scene);
        ch.truth = truth;
        return ch;
    }
    throw std::invalid_argument("unknown challenge category '" + category + "'");
}

std::string reference_script_text(const Challenge& challenge) {
    const Json& meta = challenge.scene.meta;
    if (challenge.category == "bingo") {
        std::string color = meta.at("target_color").get<std::string>();
        std::string axis = meta.at("line_axis").get<std::string>() == "col" ? "x" : "y";
        return "[pieces] = SEARCH obj IN CAPTCHA WHERE obj.color == \"" + color + "\";\n" +
               "common_x = REASON{MODE([obj.x for obj in pieces])};\n" +
               "common_y = REASON{MODE([obj.y for obj in pieces])};\n" +
               "[outlier] = SEARCH obj IN pieces WHERE obj." + axis + " != common_" + axis +
               ";\n" + "MOVE outlier TO ALIGN WITH pieces ON common_axis;\n";
    }
    if (challenge.category == "rotation") {
        return "[subject] = SEARCH obj IN CAPTCHA WHERE obj.role == \"subject\";\n"
               "[reference] = SEARCH obj IN CAPTCHA WHERE obj.role == \"reference\";\n"
               "[target_orientation] = REASON{reference.orientation};\n"
               "ROTATE subject TO target_orientation;\n";
    }
    if (challenge.category == "logical3d") {
        std::string tmpl = meta.at("template").get<std::string>();
        if (tmpl == "same_orientation") {
            std::string cand = meta.at("candidate_value").get<std::string>();
            std::string ref = meta.at("reference_value").get<std::string>();
            return "[objs] = SEARCH object IN CAPTCHA;\n"
                   "[candidates] = SEARCH obj IN objs WHERE obj.value == \"" +
                   cand + "\";\n" + "[reference] = SEARCH obj IN objs WHERE obj.value == \"" +
                   ref + "\";\n" +
                   "[reference_orientation] = REASON{reference.orientation};\n"
                   "[matches] = SEARCH obj IN candidates WHERE obj.orientation == "
                   "reference_orientation;\n"
                   "[answer_position] = LOCATE matches;\n";
        }
        if (tmpl == "left_of_larger") {
            std::string anchor = meta.at("anchor_color").get<std::string>();
            long long size = meta.at("target_size").get<long long>();
            return "[objs] = SEARCH object IN CAPTCHA;\n"
                   "[anchor] = SEARCH obj IN objs WHERE obj.color == \"" +
                   anchor + "\";\n" + "[lefts] = SEARCH obj IN objs WHERE obj.x < anchor.x;\n" +
                   "[target] = SEARCH obj IN lefts WHERE obj.size == " + std::to_string(size) +
                   ";\n" + "CLICK target;\n";
        }
        if (tmpl == "color_shape") {
            std::string color = meta.at("color").get<std::string>();
            std::string shape = meta.at("shape").get<std::string>();
            return "[objs] = SEARCH object IN CAPTCHA;\n"
                   "[right_color] = SEARCH obj IN objs WHERE obj.color == \"" +
                   color + "\";\n" + "[target] = SEARCH obj IN right_color WHERE obj.shape == \"" +
                   shape + "\";\n" + "CLICK target;\n";
        }
        throw std::invalid_argument("unknown logical3d template '" + tmpl + "'");
    }
    throw std::invalid_argument("unknown challenge category '" + challenge.category + "'");
}

const std::vector<std::pair<std::string, std::string>>& default_examples() {
    static const std::vector<std::pair<std::string, std::string>> kExamples = {
        {"Click the 0 that has the same orientation as the W.",
         "// Identify all objects present in the CAPTCHA\n"
         "[objs] = SEARCH object IN CAPTCHA;\n"
         "\n"
         "// Find the number 0 pieces and the reference letter\n"
         "[number_zero] = SEARCH obj IN objs WHERE obj.value == \"0\";\n"
         "[letter_W] = SEARCH obj IN objs WHERE obj.value == \"W\";\n"
         "\n"
         "// Read the orientation of the letter W\n"
         "[W_orientation] = REASON{letter_W.orientation};\n"
         "\n"
         "// Keep the 0 that points the same way\n"
         "[same_direction_zero] = SEARCH obj IN number_zero WHERE obj.orientation == "
         "W_orientation;\n"
         "\n"
         "// Report where it sits\n"
         "[zero_position] = LOCATE same_direction_zero;\n"},
        {"Rotate the pointer to match the orientation of the reference object.",
         "// The piece under our control\n"
         "[subject] = SEARCH obj IN CAPTCHA WHERE obj.role == \"subject\";\n"
         "\n"
         "// The fixed object showing the wanted direction\n"
         "[reference] = SEARCH obj IN CAPTCHA WHERE obj.role == \"reference\";\n"
         "\n"
         "// Read the wanted direction off the reference\n"
         "[target_orientation] = REASON{reference.orientation};\n"
         "\n"
         "// Turn the subject to it\n"
         "ROTATE subject TO target_orientation;\n"},
    };
    return kExamples;
}

// ---- generation ----

namespace {

std::string feedback_text(const std::vector<std::string>& problems) {
    std::string out = "The script was rejected:\n";
    for (const std::string& p : problems) {
        out += "- ";
        out += p;
        out += '\n';
    }
    out += "Rewrite the complete corrected script, keeping the same approach.";
    return out;
}

}  // namespace

GenerationResult generate_script(const Challenge& challenge,
                                 const std::vector<std::pair<std::string, std::string>>& examples,
                                 ModelClient& client, int max_retries) {
    if (max_retries < 0)
        throw ContractViolation("generate_script requires max_retries >= 0");
    std::string prompt = render_generation_prompt(challenge.scene.question, examples);
    std::vector<ChatMessage> convo{{"user", prompt}};
    std::vector<std::string> problems;
    for (int attempt = 1; attempt <= max_retries + 1; ++attempt) {
        std::string text = client.generate(convo, GenParams{});
        problems.clear();
        ParseResult parsed = parse_source(text);
        if (parsed.script) {
            VerifyReport report = verify(*parsed.script);
            if (report.valid) {
                GenerationResult result;
                result.script = *std::move(parsed.script);
                result.script_text = std::move(text);
                result.attempts = attempt;
                result.first_try_valid = attempt == 1;
                return result;
            }
            for (const Diagnostic& d : report.diagnostics)
                if (!d.warning)
                    problems.push_back(std::string(diag_code_name(d.code)) + ": " + explain(d));
        } else {
            for (const ParseDiagnostic& d : parsed.diagnostics) problems.push_back(d.message);
        }
        if (attempt == max_retries + 1) break;
        convo.push_back({"assistant", std::move(text)});
        convo.push_back({"user", feedback_text(problems)});
    }
    throw GenerationFailed("no valid script after " + std::to_string(max_retries + 1) +
                               " attempt(s)",
                           problems, max_retries + 1);
}

// ---- solving ----

namespace {

struct LineInfo {
    enum class Kind { other, operate, locate };
    Kind kind = Kind::other;
    OperateKind op = OperateKind::click;
    std::string subject;  // operate subject / locate target binding
};

void collect_lines(const std::vector<Statement>& stmts, std::map<int, LineInfo>& out) {
    for (const Statement& st : stmts) {
        if (const auto* a = std::get_if<Assignment>(&st.node)) {
            if (const auto* loc = std::get_if<LocateExpr>(&a->value.front().node)) {
                LineInfo info;
                info.kind = LineInfo::Kind::locate;
                info.subject = loc->target;
                out[a->span.line] = info;
            }
        } else if (const auto* f = std::get_if<ForLoop>(&st.node)) {
            collect_lines(f->body, out);
        } else if (const auto* s = std::get_if<IfStmt>(&st.node)) {
            for (const IfBranch& b : s->branches) collect_lines(b.body, out);
            collect_lines(s->else_body, out);
        } else if (const auto* op = std::get_if<OperateStmt>(&st.node)) {
            LineInfo info;
            info.kind = LineInfo::Kind::operate;
            info.op = op->op;
            info.subject = op->subject;
            out[op->span.line] = info;
        }
    }
}

std::optional<std::string> last_known_id(const Fragments& frag, const Scene& scene) {
    std::set<std::string> known = scene_ids(scene);
    for (auto it = frag.words.rbegin(); it != frag.words.rend(); ++it)
        if (known.count(*it)) return *it;
    return std::nullopt;
}

// The reply of the step that introduced `binding`, for recovering a subject
// id the final reply does not repeat.
std::optional<std::string> binding_reply_id(const std::string& binding,
                                            const InstructionList& instructions,
                                            const std::vector<StepOutcome>& steps,
                                            std::size_t upto, const Scene& scene) {
    const Instruction& inst = instructions.steps[upto];
    for (const BindingRef& ref : inst.binding_refs) {
        if (ref.name != binding) continue;
        int idx = ref.introduced_at_step;  // 1-based instruction index
        if (idx >= 1 && idx <= static_cast<int>(steps.size()))
            return last_known_id(scan_reply(steps[idx - 1].reply), scene);
    }
    return std::nullopt;
}

std::optional<Answer> answer_from_reply(const std::string& reply, const LineInfo& info,
                                        const InstructionList& instructions,
                                        const std::vector<StepOutcome>& steps, std::size_t index,
                                        const Scene& scene) {
    Fragments frag = scan_reply(reply);
    if (info.kind == LineInfo::Kind::locate) {
        if (frag.positions.empty()) return std::nullopt;
        const SceneObject* obj = object_at(scene, frag.positions.back());
        if (!obj) return std::nullopt;
        Answer a;
        a.kind = ActionKind::click;
        a.object_id = obj->id;
        return a;
    }
    switch (info.op) {
        case OperateKind::click: {
            std::optional<std::string> id = last_known_id(frag, scene);
            if (!id) return std::nullopt;
            Answer a;
            a.kind = ActionKind::click;
            a.object_id = *id;
            return a;
        }
        case OperateKind::rotate: {
            if (frag.degrees.empty()) return std::nullopt;
            Answer a;
            a.kind = ActionKind::rotate;
            a.degrees = normalized(frag.degrees.back()).degrees;
            if (std::optional<std::string> id = last_known_id(frag, scene)) a.object_id = *id;
            return a;
        }
        case OperateKind::move: {
            if (frag.positions.empty()) return std::nullopt;
            Answer a;
            a.kind = ActionKind::move;
            a.to = frag.positions.back();
            std::optional<std::string> id = last_known_id(frag, scene);
            if (!id) id = binding_reply_id(info.subject, instructions, steps, index, scene);
            if (!id) return std::nullopt;
            a.object_id = *id;
            return a;
        }
    }
    return std::nullopt;
}

// Terminal-answer convention over replies: the latest action step whose reply
// parses, else the latest locate step naming an occupied cell.
std::optional<Answer> assemble_answer(const std::map<int, LineInfo>& lines,
                                      const InstructionList& instructions,
                                      const std::vector<StepOutcome>& steps,
                                      const Scene& scene) {
    for (auto kind : {LineInfo::Kind::operate, LineInfo::Kind::locate}) {
        for (std::size_t i = steps.size(); i-- > 0;) {
            auto it = lines.find(steps[i].line);
            if (it == lines.end() || it->second.kind != kind) continue;
            if (std::optional<Answer> a =
                    answer_from_reply(steps[i].reply, it->second, instructions, steps, i, scene))
                return a;
        }
    }
    return std::nullopt;
}

}  // namespace

SolveResult solve(const Challenge& challenge, const Script& script, ModelClient& client,
                  const SolveOptions& opts) {
    const auto started = std::chrono::steady_clock::now();
    const Usage usage_before = client.usage();

    SolveResult result;
    result.report.challenge_id = challenge.id;
    result.report.category = challenge.category;

    InstructionList instructions = translate(script);
    PromptBundle bundled = bundle(instructions, opts.mode, challenge.id);

    std::map<int, LineInfo> lines;
    collect_lines(script.statements, lines);

    // Oracle for judging: the script run deterministically on the scene. A
    // runtime failure leaves the steps unjudged rather than failing the solve.
    std::vector<std::optional<Value>> oracle;
    bool judged_mode = false;
    if (opts.judge_with_oracle && opts.mode == BundleMode::conversational) {
        try {
            ExecOptions eo;
            eo.strict = opts.strict;
            ExecutionResult exec = execute(script, challenge.scene, eo);
            oracle = oracle_values(instructions, exec);
            judged_mode = true;
        } catch (const RuntimeError&) {
            oracle.clear();
        }
    }

    auto finish = [&](bool aborted) {
        TrialReport& r = result.report;
        r.subtasks_judged = judged_mode;
        r.subtask_count = 0;
        r.subtask_successes = 0;
        for (const StepOutcome& s : result.steps) {
            if (!s.judged) continue;
            ++r.subtask_count;
            if (s.correct) ++r.subtask_successes;
        }
        bool answer_ok = false;
        if (!aborted) {
            result.answer = assemble_answer(lines, instructions, result.steps, challenge.scene);
            if (result.answer) {
                try {
                    answer_ok = check_answer(challenge.scene, challenge.truth, *result.answer);
                } catch (const KindMismatch&) {
                    answer_ok = false;
                }
            }
        }
        r.overall_success =
            !aborted && answer_ok && r.subtask_successes == r.subtask_count;
        const Usage& after = client.usage();
        r.token_cost = (after.input_tokens - usage_before.input_tokens) +
                       (after.output_tokens - usage_before.output_tokens);
        r.monetary_cost = after.monetary_cost - usage_before.monetary_cost;
        r.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    };

    GenParams params;
    std::vector<ChatMessage> convo;
    if (opts.mode == BundleMode::single_shot) {
        convo.push_back({"user", bundled.messages.front().text});
        StepOutcome out;
        out.index = 1;
        out.line = instructions.steps.empty() ? 0 : instructions.steps.back().line;
        out.instruction = bundled.messages.front().text;
        try {
            out.reply = client.generate(convo, params);
        } catch (const ClientError& e) {
            finish(true);
            throw SolveAborted(e.what(), std::move(result));
        }
        result.steps.push_back(std::move(out));
        finish(false);
        return result;
    }

    for (std::size_t i = 0; i < bundled.messages.size(); ++i) {
        convo.push_back({"user", bundled.messages[i].text});
        StepOutcome out;
        out.index = static_cast<int>(i) + 1;
        out.line = instructions.steps[i].line;
        out.instruction = instructions.steps[i].text;
        try {
            out.reply = client.generate(convo, params);
        } catch (const ClientError& e) {
            result.steps.push_back(std::move(out));
            finish(true);
            throw SolveAborted(e.what(), std::move(result));
        }
        convo.push_back({"assistant", out.reply});
        if (judged_mode && oracle[i]) {
            out.judged = true;
            out.expected = reply_render(*oracle[i]);
            out.correct = reply_matches(out.reply, *oracle[i], challenge.scene);
        }
        result.steps.push_back(std::move(out));
    }
    finish(false);
    return result;
}

// ---- reports ----

Json trial_to_json(const TrialReport& t) {
    Json j;
    j["challenge_id"] = t.challenge_id;
    j["category"] = t.category;
    j["script_valid_first_try"] = t.script_valid_first_try;
    j["retries"] = t.retries;
    if (t.subtasks_judged) {
        j["subtask_count"] = t.subtask_count;
        j["subtask_successes"] = t.subtask_successes;
    } else {
        j["subtask_count"] = nullptr;
        j["subtask_successes"] = nullptr;
    }
    j["overall_success"] = t.overall_success;
    j["wall_time_ms"] = t.wall_time_ms;
    j["token_cost"] = t.token_cost;
    j["monetary_cost"] = t.monetary_cost;
    return j;
}

std::string trial_csv_header() {
    return "challenge_id,category,script_valid_first_try,retries,subtask_count,"
           "subtask_successes,overall_success,wall_time_ms,token_cost,monetary_cost";
}

std::string trial_csv_row(const TrialReport& t) {
    char money[48];
    std::snprintf(money, sizeof money, "%.6f", t.monetary_cost);
    std::string row = t.challenge_id + "," + t.category + "," +
                      (t.script_valid_first_try ? "true" : "false") + "," +
                      std::to_string(t.retries) + ",";
    row += t.subtasks_judged ? std::to_string(t.subtask_count) : "";
    row += ",";
    row += t.subtasks_judged ? std::to_string(t.subtask_successes) : "";
    row += ",";
    row += t.overall_success ? "true" : "false";
    row += "," + std::to_string(t.wall_time_ms) + "," + std::to_string(t.token_cost) + "," +
           money;
    return row;
}

}  // namespace cdsl
