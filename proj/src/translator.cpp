#include "cdsl/translator.hpp"

#include <map>

#include "cdsl/verifier.hpp"

namespace cdsl {

namespace {

const char* kPreamble =
    "You are solving a CAPTCHA challenge presented in the attached image. Follow the numbered "
    "steps in order. Answer each step concisely and exactly; later steps may refer to earlier "
    "answers.";

std::string comparator_phrase(Comparator c) {
    switch (c) {
        case Comparator::eq: return "is";
        case Comparator::ne: return "is not";
        case Comparator::lt: return "is less than";
        case Comparator::gt: return "is greater than";
        case Comparator::le: return "is at most";
        case Comparator::ge: return "is at least";
    }
    return "is";
}

Comparator inverted(Comparator c) {
    switch (c) {
        case Comparator::eq: return Comparator::ne;
        case Comparator::ne: return Comparator::eq;
        case Comparator::lt: return Comparator::ge;
        case Comparator::gt: return Comparator::le;
        case Comparator::le: return Comparator::gt;
        case Comparator::ge: return Comparator::lt;
    }
    return c;
}

// Pushes NOT down to the leaves so the rendered text never reads
// "whose not (...)". Comparator inversion is exact under the three-valued
// comparison semantics, so meaning is preserved; only truth-valued atoms keep
// an explicit "not".
Predicate push_not(const Predicate& p, bool negate) {
    if (p.kind == Predicate::Kind::not_) return push_not(p.children[0], !negate);
    Predicate q = p;
    switch (p.kind) {
        case Predicate::Kind::comparison:
            if (negate) q.comparison[0].cmp = inverted(q.comparison[0].cmp);
            return q;
        case Predicate::Kind::atom:
            if (!negate) return q;
            {
                Predicate wrap;
                wrap.kind = Predicate::Kind::not_;
                wrap.span = p.span;
                wrap.children.push_back(std::move(q));
                return wrap;
            }
        case Predicate::Kind::and_:
        case Predicate::Kind::or_: {
            bool flip = negate;
            q.kind = (p.kind == Predicate::Kind::and_) == !flip ? Predicate::Kind::and_
                                                                : Predicate::Kind::or_;
            q.children[0] = push_not(p.children[0], negate);
            q.children[1] = push_not(p.children[1], negate);
            return q;
        }
        case Predicate::Kind::not_: break;  // handled above
    }
    return q;
}

// "colors" -> "color"; names that do not look plural stay as they are.
std::string singular(const std::string& word) {
    if (word.size() > 1 && word.back() == 's' && word[word.size() - 2] != 's')
        return word.substr(0, word.size() - 1);
    return word;
}

class Translator {
public:
    InstructionList run(const Script& script) {
        InstructionList list;
        list.preamble = kPreamble;
        for (const Statement& st : script.statements) statement(st, "");
        list.steps = std::move(steps_);
        return list;
    }

private:
    std::vector<Instruction> steps_;
    std::map<std::string, int> introduced_;  // binding -> step that created it
    std::vector<BindingRef> refs_;           // refs of the step being built
    int line_ = 0;                           // line of the statement being rendered

    int next_index() const { return static_cast<int>(steps_.size()) + 1; }

    void touch(const std::string& name) {
        auto it = introduced_.find(name);
        if (it == introduced_.end()) return;
        for (const BindingRef& r : refs_)
            if (r.name == name) return;
        refs_.push_back(BindingRef{name, it->second});
    }

    // Emits the collected text as the next step and returns its index.
    int emit(const std::string& prefix, std::string text) {
        Instruction step;
        step.index = next_index();
        step.line = line_;
        step.text = prefix + std::move(text);
        step.binding_refs = std::move(refs_);
        refs_.clear();
        steps_.push_back(std::move(step));
        return steps_.back().index;
    }

    void introduce(const std::string& name, int step) { introduced_[name] = step; }

    // ---- statements ----

    void statement(const Statement& st, const std::string& prefix) {
        std::visit(
            [&](const auto& node) {
                line_ = node.span.line;
                stmt(node, prefix);
            },
            st.node);
    }

    void stmt(const Comment&, const std::string&) {}

    void stmt(const Assignment& a, const std::string& prefix) {
        int step = emit(prefix, assignment_text(a));
        for (const std::string& target : a.targets) introduce(target, step);
    }

    void stmt(const ForLoop& f, const std::string& prefix) {
        touch(f.iterable);
        int framing = emit(prefix, "Repeat the following for each " + singular(f.iterable) +
                                       " in " + f.iterable + ":");
        introduce(f.var, framing);
        std::string body_prefix = "For the current " + f.var + ": ";
        for (const Statement& st : f.body) statement(st, body_prefix);
    }

    void stmt(const IfStmt& s, const std::string& prefix) {
        for (std::size_t i = 0; i < s.branches.size(); ++i) {
            const IfBranch& b = s.branches[i];
            std::string cond = phrase(b.condition, nullptr);
            std::string head = i == 0 ? "If " : "Otherwise, if ";
            line_ = b.span.line;
            emit(prefix, head + cond + ", do the following:");
            for (const Statement& st : b.body) statement(st, "In that case: ");
        }
        if (!s.else_body.empty()) {
            line_ = s.span.line;
            emit(prefix, "Otherwise, do the following:");
            for (const Statement& st : s.else_body) statement(st, "In that case: ");
        }
    }

    void stmt(const OperateStmt& op, const std::string& prefix) {
        touch(op.subject);
        switch (op.op) {
            case OperateKind::move:
                if (op.align) {
                    touch(op.align->set);
                    emit(prefix, "Move " + op.subject + " to align with " + op.align->set +
                                     " on the " + axis_phrase(op.align->axis) + " axis.");
                } else {
                    std::string row = coord_phrase(op.cell->row);
                    std::string col = coord_phrase(op.cell->col);
                    emit(prefix,
                         "Move " + op.subject + " to cell (" + row + ", " + col + ").");
                }
                return;
            case OperateKind::rotate:
                emit(prefix, "Rotate " + op.subject + " to " +
                                 rotate_target_phrase(op.rotate_target.front()) + ".");
                return;
            case OperateKind::click:
                emit(prefix, "Click " + op.subject + ".");
                return;
        }
    }

    // ---- fragments ----

    std::string axis_phrase(const std::string& axis) {
        return axis == "common_axis" ? "common" : axis;
    }

    std::string coord_phrase(const CellCoord& c) {
        if (c.is_number) return std::to_string(c.number);
        touch(c.name);
        return c.name;
    }

    std::string rotate_target_phrase(const Expr& e) {
        if (std::holds_alternative<Literal>(e.node)) {
            const auto& l = std::get<Literal>(e.node);
            if (!l.is_string) return std::to_string(l.number_value) + " degrees";
            return "\"" + l.string_value + "\"";
        }
        if (std::holds_alternative<AttributeAccess>(e.node)) {
            const auto& a = std::get<AttributeAccess>(e.node);
            touch(a.object);
            return "the " + a.attribute + " of " + a.object;
        }
        if (std::holds_alternative<VarRef>(e.node)) {
            const auto& v = std::get<VarRef>(e.node);
            touch(v.name);
            return v.name;
        }
        return "the indicated orientation";  // unreachable for verified scripts
    }

    std::string assignment_text(const Assignment& a) {
        const Expr& value = a.value.front();
        if (std::holds_alternative<SearchExpr>(value.node))
            return search_text(std::get<SearchExpr>(value.node));
        if (std::holds_alternative<ReasonExpr>(value.node))
            return reason_text(std::get<ReasonExpr>(value.node).description);
        if (std::holds_alternative<LocateExpr>(value.node)) {
            const auto& l = std::get<LocateExpr>(value.node);
            touch(l.target);
            return "Report the position (row, column) of " + l.target + ".";
        }
        // Plain value assignments keep the target visible; nothing else would
        // tie the name to the value.
        std::string targets;
        for (std::size_t i = 0; i < a.targets.size(); ++i)
            targets += (i ? ", " : "") + a.targets[i];
        return "Let " + targets + " be " + value_phrase(value) + ".";
    }

    std::string search_text(const SearchExpr& s) {
        std::string source = s.source_is_captcha ? std::string("the CAPTCHA") : s.source;
        if (!s.source_is_captcha) touch(s.source);
        std::string text = "Identify all " + s.element_var + " in " + source;
        if (!s.where.empty()) text += " whose " + phrase(s.where.front(), &s.element_var);
        return text + ". List them.";
    }

    std::string reason_text(const Description& d) {
        switch (d.form) {
            case DescriptionForm::attr_read:
                touch(d.attr->object);
                return "Consider: the " + d.attr->attribute + " of " + d.attr->object + "." +
                       (d.attr->attribute == "orientation" ? " Report the orientation."
                                                           : " Report the value.");
            case DescriptionForm::comprehension:
                touch(d.source);
                return "Consider: the " + d.attr->attribute + " of each " + d.element_var +
                       " in " + d.source + ". List the values.";
            case DescriptionForm::mode:
                touch(d.source);
                return "Consider: the most frequent " + d.attr->attribute + " among " + d.source +
                       ". Report the value.";
            case DescriptionForm::count_compare:
                return "Consider: whether " + count_phrase(d) +
                       ". Answer true, false, or unknown.";
            case DescriptionForm::free_text:
                for (const std::string& ref : d.embedded_refs) {
                    auto dot = ref.find('.');
                    touch(dot == std::string::npos ? ref : ref.substr(0, dot));
                }
                return "Consider: " + d.raw + ". Answer true, false, or unknown.";
        }
        return {};
    }

    std::string count_phrase(const Description& d) {
        touch(d.source);
        return "the number of objects in " + d.source + " whose " +
               phrase(d.count_pred.front(), &d.element_var) + " " +
               comparator_phrase(d.count_cmp) + " " + std::to_string(d.count_rhs);
    }

    std::string phrase(const Predicate& p, const std::string* element_var) {
        return predicate_phrase(push_not(p, false), element_var);
    }

    // element_var, when given, names the per-object variable whose attributes
    // read as bare names ("color is c"); attributes of anything else read as
    // "the color of that".
    std::string predicate_phrase(const Predicate& p, const std::string* element_var) {
        switch (p.kind) {
            case Predicate::Kind::comparison: {
                const Comparison& c = p.comparison.front();
                std::string lhs;
                if (std::holds_alternative<AttributeAccess>(c.lhs)) {
                    const auto& a = std::get<AttributeAccess>(c.lhs);
                    if (element_var && a.object == *element_var) {
                        lhs = a.attribute;
                    } else {
                        touch(a.object);
                        lhs = "the " + a.attribute + " of " + a.object;
                    }
                } else {
                    const auto& v = std::get<VarRef>(c.lhs);
                    touch(v.name);
                    lhs = v.name;
                }
                return lhs + " " + comparator_phrase(c.cmp) + " " +
                       value_phrase(c.operand.front(), element_var);
            }
            case Predicate::Kind::atom: {
                const Expr& a = p.atom.front();
                if (std::holds_alternative<ReasonExpr>(a.node)) {
                    const Description& d = std::get<ReasonExpr>(a.node).description;
                    if (d.form == DescriptionForm::count_compare) return count_phrase(d);
                    return d.raw;
                }
                if (std::holds_alternative<VarRef>(a.node)) {
                    touch(std::get<VarRef>(a.node).name);
                    return std::get<VarRef>(a.node).name;
                }
                return {};
            }
            case Predicate::Kind::and_:
                return pred_child(p.children[0], element_var) + " and " +
                       pred_child(p.children[1], element_var);
            case Predicate::Kind::or_:
                return pred_child(p.children[0], element_var) + " or " +
                       pred_child(p.children[1], element_var);
            case Predicate::Kind::not_: {
                const Predicate& inner = p.children[0];
                bool compound =
                    inner.kind == Predicate::Kind::and_ || inner.kind == Predicate::Kind::or_;
                std::string body = predicate_phrase(inner, element_var);
                return compound ? "not (" + body + ")" : "not " + body;
            }
        }
        return {};
    }

    std::string pred_child(const Predicate& p, const std::string* element_var) {
        std::string text = predicate_phrase(p, element_var);
        if (p.kind == Predicate::Kind::or_) return "(" + text + ")";
        return text;
    }

    std::string value_phrase(const Expr& e, const std::string* element_var = nullptr) {
        if (std::holds_alternative<Literal>(e.node)) {
            const auto& l = std::get<Literal>(e.node);
            return l.is_string ? "\"" + l.string_value + "\"" : std::to_string(l.number_value);
        }
        if (std::holds_alternative<VarRef>(e.node)) {
            const auto& v = std::get<VarRef>(e.node);
            touch(v.name);
            return v.name;
        }
        if (std::holds_alternative<AttributeAccess>(e.node)) {
            const auto& a = std::get<AttributeAccess>(e.node);
            if (element_var && a.object == *element_var) return "its " + a.attribute;
            touch(a.object);
            return "the " + a.attribute + " of " + a.object;
        }
        if (std::holds_alternative<ReasonExpr>(e.node)) {
            const Description& d = std::get<ReasonExpr>(e.node).description;
            if (d.form == DescriptionForm::count_compare)
                return "whether " + count_phrase(d);
            if (d.form == DescriptionForm::mode) {
                touch(d.source);
                return "the most frequent " + d.attr->attribute + " among " + d.source;
            }
            if (d.form == DescriptionForm::attr_read) {
                touch(d.attr->object);
                return "the " + d.attr->attribute + " of " + d.attr->object;
            }
            return d.raw;
        }
        if (std::holds_alternative<Comprehension>(e.node)) {
            const auto& c = std::get<Comprehension>(e.node);
            touch(c.source);
            return "the " + c.projection.attribute + " of each " + c.element_var + " in " +
                   c.source;
        }
        if (std::holds_alternative<CallExpr>(e.node)) {
            const auto& call = std::get<CallExpr>(e.node);
            if (call.function == BuiltinFn::mode && !call.args.empty() &&
                std::holds_alternative<Comprehension>(call.args.front().node)) {
                const auto& c = std::get<Comprehension>(call.args.front().node);
                touch(c.source);
                return "the most frequent " + c.projection.attribute + " among " + c.source;
            }
            std::string inner = call.args.empty() ? std::string() : value_phrase(call.args.front());
            if (call.function == BuiltinFn::mode) return "the most frequent of " + inner;
            return "the number of objects in " + inner;
        }
        return {};
    }
};

}  // namespace

InstructionList translate(const Script& script) {
    VerifyReport report = verify(script);
    if (!report.valid)
        throw ContractViolation("translate requires a script that verifies without errors");
    return Translator().run(script);
}

Json instructions_to_json(const InstructionList& list) {
    Json j;
    j["preamble"] = list.preamble;
    j["steps"] = Json::array();
    for (const Instruction& step : list.steps) {
        Json s;
        s["index"] = step.index;
        s["line"] = step.line;
        s["text"] = step.text;
        j["steps"].push_back(std::move(s));
    }
    return j;
}

std::string render_generation_prompt(
    const std::string& task_description,
    const std::vector<std::pair<std::string, std::string>>& examples) {
    if (examples.empty())
        throw ContractViolation("render_generation_prompt requires at least one example");

    static const char* kDefinition = R"(The CAPTCHA DSL is a small imperative language. A script is a sequence of statements, one per line; blocks under FOR and IF are indented. Statements:
- [name] = SEARCH elem IN CAPTCHA WHERE elem.attr == value  -- filter objects by exactly one attribute; CAPTCHA or a previous binding as the source
- name = REASON{description}  -- an easy reasoning task; the result must be a true/false/unknown judgement, an orientation, or a value used only in equality comparisons
- [name] = LOCATE binding  -- report the grid position of a bound object
- FOR x IN xs: / IF condition: / ELIF / ELSE  -- iteration and branching
- MOVE obj TO (row, col) | MOVE obj TO ALIGN WITH set ON axis | ROTATE obj TO target | CLICK obj
Attributes: value, color, shape, size, type, orientation, x, y. Every variable must be defined before use. Comments start with //.)";

    auto count_word = [](std::size_t n) -> std::string {
        static const char* words[] = {"zero", "one", "two",   "three", "four",
                                      "five", "six", "seven", "eight", "nine"};
        return n < 10 ? words[n] : std::to_string(n);
    };

    std::string out =
        "Your task is to describe the process of solving a CAPTCHA in a custom domain specific "
        "language (DSL) named CAPTCHA DSL.\n\n";
    out += "The definition of the CAPTCHA DSL is as below:\n";
    out += kDefinition;
    out += "\n\nWe provide " + count_word(examples.size()) + " example" +
           (examples.size() == 1 ? "" : "s") + " of CAPTCHA DSLs below.\n";
    for (std::size_t i = 0; i < examples.size(); ++i) {
        out += "\nExample " + std::to_string(i + 1) + " (task: " + examples[i].first + ")\n";
        out += examples[i].second;
        if (out.back() != '\n') out += '\n';
    }
    out +=
        "\nNow given the CAPTCHA task provided, please generate the solution with DSLs, "
        "including in-line documentation for each line of code.\n\nTask: " +
        task_description + "\n";
    return out;
}

std::string render_zero_shot_prompt(const std::string& goal) {
    if (goal.empty()) throw ContractViolation("render_zero_shot_prompt requires a goal");
    return "The provided image is a CAPTCHA challenge, and your goal is to " + goal +
           ". Based on the goal, output the step-by-step solution of this type of CAPTCHA. Note "
           "that do not generate additional contents other than the instructions given above.";
}

PromptBundle bundle(const InstructionList& instructions, BundleMode mode,
                    const std::string& challenge_ref) {
    PromptBundle b;
    b.mode = mode;
    b.challenge_ref = challenge_ref;
    if (instructions.steps.empty()) {
        b.messages.push_back({"user", instructions.preamble});
        return b;
    }
    if (mode == BundleMode::conversational) {
        for (const Instruction& step : instructions.steps) {
            std::string text = step.index == 1 ? instructions.preamble + "\n\n" + step.text
                                               : step.text;
            b.messages.push_back({"user", std::move(text)});
        }
        return b;
    }
    std::string text = instructions.preamble;
    for (const Instruction& step : instructions.steps)
        text += "\n\nStep " + std::to_string(step.index) + ": " + step.text;
    b.messages.push_back({"user", std::move(text)});
    return b;
}

}  // namespace cdsl
