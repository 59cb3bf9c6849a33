// Pluggable chat-model clients. The pipeline talks to every backend through
// ModelClient and never inspects which implementation it holds.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdsl/json_util.hpp"

namespace cdsl {

class ClientError : public std::runtime_error {
public:
    explicit ClientError(const std::string& what) : std::runtime_error(what) {}
};

struct ChatMessage {
    std::string role;  // "user" | "assistant" | "system"
    std::string content;
};

struct GenParams {
    double temperature = 0;  // deterministic replies by default
    int max_tokens = 1024;
};

// Dollars per 1,000 tokens, charged separately for input and output.
struct PriceTable {
    double input_per_1k = 0;
    double output_per_1k = 0;
};

PriceTable price_table_from_json(const Json& j);
Json price_table_to_json(const PriceTable& p);

// Running totals across every generate() call on one client.
struct Usage {
    long long input_tokens = 0;
    long long output_tokens = 0;
    long long calls = 0;
    double monetary_cost = 0;  // priced per call from the client's PriceTable
};

double priced_cost(const PriceTable& price, long long input_tokens, long long output_tokens);

// Crude deterministic token estimate for clients whose backend reports none.
long long estimate_tokens(const std::string& text);

enum class ClientCapability { text, multimodal };

class ModelClient {
public:
    explicit ModelClient(PriceTable price = {}) : price_(price) {}
    virtual ~ModelClient() = default;

    virtual ClientCapability capabilities() const = 0;

    // One chat completion over the full message history. Implementations call
    // charge() once per completion so usage() stays conserved.
    virtual std::string generate(const std::vector<ChatMessage>& messages,
                                 const GenParams& params) = 0;

    const Usage& usage() const { return usage_; }
    const PriceTable& price() const { return price_; }
    void reset_usage() { usage_ = {}; }

protected:
    void charge(long long input_tokens, long long output_tokens) {
        usage_.input_tokens += input_tokens;
        usage_.output_tokens += output_tokens;
        usage_.calls += 1;
        usage_.monetary_cost += priced_cost(price_, input_tokens, output_tokens);
    }

private:
    PriceTable price_;
    Usage usage_;
};

}  // namespace cdsl
