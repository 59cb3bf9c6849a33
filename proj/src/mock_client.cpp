#include "cdsl/mock_client.hpp"

#include "cdsl/parser.hpp"

namespace cdsl {

namespace {

// First line of the few-shot generation prompt; anything containing it is a
// request for a script rather than an instruction step.
const char* kGenerationMarker = "Your task is to describe the process of solving a CAPTCHA";

// Single-shot bundles carry all numbered steps in one message.
const char* kSingleShotMarker = "\n\nStep 2: ";

const char* kNoOracle = "I cannot determine this.";
const char* kNotApplicable = "Not applicable.";

}  // namespace

MockClient::MockClient(Challenge challenge, MockConfig config, PriceTable price)
    : ModelClient(price),
      challenge_(std::move(challenge)),
      config_(config),
      rng_(config.seed),
      script_text_(reference_script_text(challenge_)) {
    Script script = parse_or_throw(script_text_);
    InstructionList instructions = translate(script);
    try {
        ExecOptions opts;
        opts.strict = config_.strict;
        ExecutionResult exec = execute(script, challenge_.scene, opts);
        oracle_ = oracle_values(instructions, exec);
    } catch (const RuntimeError&) {
        // Challenge the reference script cannot finish on: answer nothing.
        oracle_.assign(instructions.steps.size(), std::nullopt);
    }
}

std::string MockClient::generate(const std::vector<ChatMessage>& messages,
                                 const GenParams& params) {
    (void)params;  // temperature is irrelevant to a deterministic mock
    long long tokens_in = 0;
    std::size_t users = 0;
    bool generation = false;
    for (const ChatMessage& m : messages) {
        tokens_in += estimate_tokens(m.content);
        if (m.role == "user") {
            ++users;
            if (m.content.find(kGenerationMarker) != std::string::npos) generation = true;
        }
    }

    std::string reply;
    if (generation) {
        reply = generation_reply();
    } else if (users == 1 && !messages.empty() &&
               messages.front().content.find(kSingleShotMarker) != std::string::npos) {
        reply = terminal_reply();
    } else {
        reply = step_reply(users);
    }
    charge(tokens_in, estimate_tokens(reply));
    return reply;
}

std::string MockClient::generation_reply() {
    if (config_.mode == MockMode::scripted_faulty) {
        std::bernoulli_distribution faulty(config_.invalid_script_prob);
        if (faulty(rng_)) return faulty_script();
    }
    return script_text_;
}

std::string MockClient::step_reply(std::size_t index) {
    if (index == 0 || index > oracle_.size()) return kNoOracle;
    const std::optional<Value>& value = oracle_[index - 1];
    if (!value) return kNotApplicable;
    if (config_.mode == MockMode::noisy) {
        std::bernoulli_distribution corrupt(1.0 - config_.per_step_success);
        if (corrupt(rng_)) return reply_render(corrupted(*value));
    }
    return reply_render(*value);
}

std::string MockClient::terminal_reply() {
    for (std::size_t i = oracle_.size(); i-- > 0;)
        if (oracle_[i]) return reply_render(*oracle_[i]);
    return kNoOracle;
}

// Compounds the first search filter so exactly one attribute rule breaks.
std::string MockClient::faulty_script() const {
    std::size_t line_start = 0;
    while (line_start < script_text_.size()) {
        std::size_t line_end = script_text_.find('\n', line_start);
        if (line_end == std::string::npos) line_end = script_text_.size();
        std::string_view line(script_text_.data() + line_start, line_end - line_start);
        if (line.find(" WHERE ") != std::string_view::npos) {
            std::size_t insert_at = line.find(';');
            if (insert_at == std::string_view::npos) insert_at = line.size();
            std::string out = script_text_.substr(0, line_start + insert_at);
            out += " AND obj.type == \"decoy\"";
            out += script_text_.substr(line_start + insert_at);
            return out;
        }
        line_start = line_end + 1;
    }
    return script_text_ + "CLICK ghost;\n";
}

// Guaranteed-different substitutes: another id, a shifted cell or angle, the
// flipped truth value, the next number, a defaced word.
Scalar MockClient::corrupted_scalar(const Scalar& s) {
    if (const long long* n = std::get_if<long long>(&s)) return Scalar(*n + 1);
    if (const std::string* str = std::get_if<std::string>(&s)) {
        if (find_object(challenge_.scene, *str)) {
            for (const SceneObject& obj : challenge_.scene.objects)
                if (obj.id != *str) return Scalar(obj.id);
        }
        return Scalar(*str + "x");
    }
    if (const Orientation* o = std::get_if<Orientation>(&s))
        return Scalar(normalized(o->degrees + 90));
    if (const GridPos* p = std::get_if<GridPos>(&s)) return Scalar(GridPos{p->row, p->col + 1});
    Truth t = std::get<Truth>(s);
    return Scalar(t == Truth::true_ ? Truth::false_ : Truth::true_);
}

Value MockClient::corrupted(const Value& v) {
    if (const ObjectSet* set = std::get_if<ObjectSet>(&v)) {
        ObjectSet out = *set;
        if (out.ids.empty()) {
            if (!challenge_.scene.objects.empty())
                out.ids.push_back(challenge_.scene.objects.front().id);
            else
                out.ids.push_back("ghost");
        } else {
            out.ids.erase(out.ids.begin());
        }
        return Value(out);
    }
    if (const ObjectRef* ref = std::get_if<ObjectRef>(&v)) {
        for (const SceneObject& obj : challenge_.scene.objects)
            if (obj.id != ref->id) return Value(ObjectRef{obj.id});
        return Value(ObjectRef{ref->id + "x"});
    }
    if (const Truth* t = std::get_if<Truth>(&v))
        return Value(*t == Truth::true_ ? Truth::false_ : Truth::true_);
    if (const Orientation* o = std::get_if<Orientation>(&v))
        return Value(normalized(o->degrees + 90));
    if (const long long* n = std::get_if<long long>(&v)) return Value(*n + 1);
    if (const std::string* s = std::get_if<std::string>(&v)) return Value(*s + "x");
    if (const GridPos* p = std::get_if<GridPos>(&v)) return Value(GridPos{p->row, p->col + 1});
    ListValue list = std::get<ListValue>(v);
    if (list.items.empty()) return Value(list);
    std::uniform_int_distribution<std::size_t> pick(0, list.items.size() - 1);
    std::size_t at = pick(rng_);
    list.items[at] = corrupted_scalar(list.items[at]);
    return Value(list);
}

}  // namespace cdsl
