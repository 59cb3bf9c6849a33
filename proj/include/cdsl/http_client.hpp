// Chat-completion client for any JSON-over-HTTP endpoint that speaks the
// common {model, messages} request / {choices, usage} response shape. The
// key comes from the environment, never from config files.
#pragma once

#include <string>
#include <vector>

#include "cdsl/client.hpp"

namespace cdsl {

struct HttpClientConfig {
    std::string url;    // e.g. "http://localhost:8080/v1/chat/completions"
    std::string model;  // forwarded verbatim in the request body
    std::string api_key_env = "CAPTCHA_DSL_API_KEY";
    int timeout_seconds = 120;
};

class HttpClient : public ModelClient {
public:
    explicit HttpClient(HttpClientConfig config, PriceTable price = {});

    ClientCapability capabilities() const override { return ClientCapability::text; }

    // POSTs the full history; throws ClientError on transport failure,
    // non-2xx status, or a reply that lacks message content. Token usage
    // comes from the response when reported, otherwise from size estimates.
    std::string generate(const std::vector<ChatMessage>& messages,
                         const GenParams& params) override;

private:
    HttpClientConfig config_;
    std::string host_;  // scheme://authority
    std::string path_;
};

}  // namespace cdsl
