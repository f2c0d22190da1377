#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace semev {

inline constexpr const char* kToolVersion = "0.1.0";

// Canonical form: objects key-sorted, integral-valued floats rewritten as integers.
// Hashing this form makes flag and config-file invocations of equal value collide.
nlohmann::json canonicalize(const nlohmann::json& j);
std::string canonical_dump(const nlohmann::json& j);

// FNV-1a 64 over the canonical dump, rendered as 16 hex digits.
std::string config_hash(const nlohmann::json& config);
std::uint64_t fnv1a64(const void* data, std::size_t size);

// Temp-file-then-rename; the target never holds partial content.
void write_file_atomic(const std::string& path, const std::string& content);

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    std::int64_t started = 0;   // epoch seconds
    std::int64_t finished = 0;
    std::vector<std::string> artifacts;
    nlohmann::json extra;  // command-specific block (e.g. the pipeline filter funnel)

    nlohmann::json to_json() const;
};

}  // namespace semev
