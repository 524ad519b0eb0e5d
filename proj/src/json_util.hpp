#pragma once

// Shared helpers for the JSON-backed input files.

#include "mga/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace mga::detail
{

using Json = nlohmann::json;

inline int line_at_offset(std::string_view text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

/// Line of the first occurrence of `"key"` in the source, 0 if absent.
inline int line_of_key(std::string_view text, std::string_view key)
{
    const std::string quoted = "\"" + std::string(key) + "\"";
    const auto pos = text.find(quoted);
    return pos == std::string_view::npos ? 0 : line_at_offset(text, pos);
}

inline Json parse_json(std::string_view text)
{
    try
    {
        return Json::parse(text.begin(), text.end());
    }
    catch (const Json::parse_error &e)
    {
        throw ValidationError(std::string("malformed JSON: ") + e.what(),
                              line_at_offset(text, e.byte > 0 ? e.byte - 1 : 0));
    }
}

inline std::string read_text_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Typed field access that reports the offending key's line.
template <typename T>
T require(const Json &obj, std::string_view key, std::string_view source)
{
    const auto it = obj.find(std::string(key));
    if (it == obj.end())
        throw ValidationError("missing field '" + std::string(key) + "'", line_of_key(source, key));
    try
    {
        return it->get<T>();
    }
    catch (const Json::exception &)
    {
        throw ValidationError("field '" + std::string(key) + "' has the wrong type", line_of_key(source, key));
    }
}

template <typename T>
T optional_field(const Json &obj, std::string_view key, T fallback, std::string_view source)
{
    if (!obj.contains(std::string(key)))
        return fallback;
    return require<T>(obj, key, source);
}

}  // namespace mga::detail
