// Deterministic stand-in for a chat model, bound to one challenge. Generation
// prompts get the challenge's reference script; instruction steps are answered
// from the interpreter oracle, optionally corrupted per step.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cdsl/client.hpp"
#include "cdsl/pipeline.hpp"

namespace cdsl {

enum class MockMode { perfect, noisy, scripted_faulty };

struct MockConfig {
    MockMode mode = MockMode::perfect;
    // noisy: each answered step is corrupted independently with probability
    // 1 - per_step_success (wrong id, shifted cell/orientation, flipped truth).
    double per_step_success = 1.0;
    // scripted_faulty: each generation attempt independently emits a script
    // with a compound search filter (one V002) with this probability.
    double invalid_script_prob = 0;
    std::uint64_t seed = 0;
    bool strict = false;  // oracle interpreter strictness
};

class MockClient : public ModelClient {
public:
    explicit MockClient(Challenge challenge, MockConfig config = {}, PriceTable price = {});

    ClientCapability capabilities() const override { return ClientCapability::multimodal; }
    std::string generate(const std::vector<ChatMessage>& messages,
                         const GenParams& params) override;

    const std::string& reference_script() const { return script_text_; }

private:
    std::string generation_reply();
    std::string step_reply(std::size_t index);  // 1-based instruction index
    std::string terminal_reply();               // single-shot bundles
    std::string faulty_script() const;
    Value corrupted(const Value& v);
    Scalar corrupted_scalar(const Scalar& s);

    Challenge challenge_;
    MockConfig config_;
    std::mt19937_64 rng_;
    std::string script_text_;
    std::vector<std::optional<Value>> oracle_;  // per instruction, when derivable
};

}  // namespace cdsl
