#include "cdsl/client.hpp"

namespace cdsl {

double priced_cost(const PriceTable& price, long long input_tokens, long long output_tokens) {
    return static_cast<double>(input_tokens) / 1000.0 * price.input_per_1k +
           static_cast<double>(output_tokens) / 1000.0 * price.output_per_1k;
}

// ~4 bytes per token, the usual rule of thumb; exact counts come from
// backends that report them.
long long estimate_tokens(const std::string& text) {
    return static_cast<long long>((text.size() + 3) / 4);
}

PriceTable price_table_from_json(const Json& j) {
    PriceTable p;
    if (j.contains("input_per_1k")) p.input_per_1k = j.at("input_per_1k").get<double>();
    if (j.contains("output_per_1k")) p.output_per_1k = j.at("output_per_1k").get<double>();
    return p;
}

Json price_table_to_json(const PriceTable& p) {
    Json j;
    j["input_per_1k"] = p.input_per_1k;
    j["output_per_1k"] = p.output_per_1k;
    return j;
}

}  // namespace cdsl
