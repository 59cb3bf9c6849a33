// Deterministic rendering of verified scripts into numbered natural-language
// steps, plus the generation/zero-shot prompt templates and message bundling.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cdsl/ast.hpp"
#include "cdsl/json_util.hpp"

namespace cdsl {

struct BindingRef {
    std::string name;
    int introduced_at_step = 0;
};

struct Instruction {
    int index = 0;  // 1-based, contiguous
    int line = 0;   // source line of the statement this step renders
    std::string text;
    std::vector<BindingRef> binding_refs;
};

struct InstructionList {
    std::string preamble;
    std::vector<Instruction> steps;
};

// Requires a script that verifies without errors; throws ContractViolation
// otherwise.
InstructionList translate(const Script& script);

// {preamble, steps:[{index, text}]}
Json instructions_to_json(const InstructionList& list);

// Few-shot generation prompt: DSL definition, worked examples, then the task.
// examples are (task description, dsl source) pairs; at least one required.
std::string render_generation_prompt(
    const std::string& task_description,
    const std::vector<std::pair<std::string, std::string>>& examples);

// Single-prompt variant asking for a step-by-step solution toward `goal`.
std::string render_zero_shot_prompt(const std::string& goal);

enum class BundleMode { conversational, single_shot };

struct PromptMessage {
    std::string role;  // always "user"; replies interleave at run time
    std::string text;
};

struct PromptBundle {
    BundleMode mode = BundleMode::conversational;
    std::vector<PromptMessage> messages;
    std::string challenge_ref;  // opaque image/scene handle
};

PromptBundle bundle(const InstructionList& instructions, BundleMode mode,
                    const std::string& challenge_ref);

}  // namespace cdsl
