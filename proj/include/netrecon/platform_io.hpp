#pragma once

// JSON documents for platforms, plus small file helpers shared by the other
// on-disk formats.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "netrecon/platform.hpp"

namespace netrecon {

using Json = nlohmann::json;

/// Field names: name, nodes [{id, kind}], edges [{a, b, latency_ms, bandwidth_mbps}].
Json platform_to_json(const Platform& p);
/// Strict: unknown fields are rejected; errors name the offending record.
/// Does not check connectivity.
Platform platform_from_json(const Json& doc);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Throws if `obj` is not an object or has a key outside `allowed`.
void require_fields(const Json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where);

}  // namespace netrecon
