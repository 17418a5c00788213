#ifndef PARSETALK_SRC_JSON_UTIL_H_
#define PARSETALK_SRC_JSON_UTIL_H_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

namespace parsetalk::internal {

// Parses `text`, turning syntax errors into ErrorT with a 1-based line number.
template <typename ErrorT>
nlohmann::json ParseDocument(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    size_t line = 1;
    size_t limit = std::min<size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ErrorT(std::string(what) + ": parse error at line " + std::to_string(line) + ": " +
                 e.what());
  }
}

template <typename ErrorT>
std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ErrorT("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename ErrorT>
const nlohmann::json& RequireKey(const nlohmann::json& obj, const char* key,
                                 std::string_view context) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ErrorT(std::string(context) + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

template <typename ErrorT>
std::string RequireString(const nlohmann::json& obj, const char* key, std::string_view context) {
  const auto& v = RequireKey<ErrorT>(obj, key, context);
  if (!v.is_string()) {
    throw ErrorT(std::string(context) + ": key '" + key + "' must be a string");
  }
  return v.template get<std::string>();
}

}  // namespace parsetalk::internal

#endif  // PARSETALK_SRC_JSON_UTIL_H_
