#include "cdsl/http_client.hpp"

#include <cstdlib>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace cdsl {

HttpClient::HttpClient(HttpClientConfig config, PriceTable price)
    : ModelClient(price), config_(std::move(config)) {
    // Split "scheme://authority/path" so httplib gets the base and the route
    // separately.
    const std::string& url = config_.url;
    std::size_t scheme = url.find("://");
    std::size_t path_at = scheme == std::string::npos ? url.find('/')
                                                      : url.find('/', scheme + 3);
    if (path_at == std::string::npos) {
        host_ = url;
        path_ = "/";
    } else {
        host_ = url.substr(0, path_at);
        path_ = url.substr(path_at);
    }
}

std::string HttpClient::generate(const std::vector<ChatMessage>& messages,
                                 const GenParams& params) {
    if (host_.empty()) throw ClientError("http client has no endpoint URL configured");

    Json body;
    body["model"] = config_.model;
    body["messages"] = Json::array();
    for (const ChatMessage& m : messages)
        body["messages"].push_back(Json{{"role", m.role}, {"content", m.content}});
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_tokens;

    httplib::Client client(host_);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    httplib::Result res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res)
        throw ClientError("request to " + host_ + path_ +
                          " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw ClientError("endpoint returned status " + std::to_string(res->status) + ": " +
                          res->body.substr(0, 512));

    Json reply = Json::parse(res->body, nullptr, false);
    if (reply.is_discarded())
        throw ClientError("endpoint returned a reply that is not JSON");
    std::string content;
    try {
        content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception&) {
        throw ClientError("endpoint reply carries no choices[0].message.content");
    }

    long long tokens_in = 0;
    long long tokens_out = 0;
    if (reply.contains("usage") && reply["usage"].is_object()) {
        const Json& usage = reply["usage"];
        if (usage.contains("prompt_tokens")) tokens_in = usage["prompt_tokens"].get<long long>();
        if (usage.contains("completion_tokens"))
            tokens_out = usage["completion_tokens"].get<long long>();
    }
    if (tokens_in == 0)
        for (const ChatMessage& m : messages) tokens_in += estimate_tokens(m.content);
    if (tokens_out == 0) tokens_out = estimate_tokens(content);
    charge(tokens_in, tokens_out);
    return content;
}

}  // namespace cdsl
