#include "semev/manifest.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace semev {

using nlohmann::json;

json canonicalize(const json& j) {
    switch (j.type()) {
        case json::value_t::object: {
            json out = json::object();
            for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = canonicalize(it.value());
            return out;
        }
        case json::value_t::array: {
            json out = json::array();
            for (const auto& v : j) out.push_back(canonicalize(v));
            return out;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v) && std::floor(v) == v && std::abs(v) < 9.0e15)
                return json(static_cast<std::int64_t>(v));
            return j;
        }
        default:
            return j;
    }
}

std::string canonical_dump(const json& j) { return canonicalize(j).dump(); }

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const json& config) {
    const std::string dump = canonical_dump(config);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(dump.data(), dump.size())));
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

json RunManifest::to_json() const {
    json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["tool_version"] = tool_version;
    j["started"] = started;
    j["finished"] = finished;
    j["artifacts"] = artifacts;
    if (!extra.is_null()) j["extra"] = extra;
    return j;
}

}  // namespace semev
