// Shared JSON conventions: ordered_json keeps key order stable for golden
// files, and writes go through a temp-file + rename so readers never observe
// a partial document.
#pragma once

#include <json.hpp>

#include <string>

namespace cdsl {

using Json = nlohmann::ordered_json;

// Serializes with 2-space indentation and a trailing newline — the one format
// used for every JSON artifact so goldens stay byte-stable.
std::string to_json_text(const Json& j);

// Atomic write: temp file in the same directory, fsync-free rename.
// Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace cdsl
