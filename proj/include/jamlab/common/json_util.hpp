#pragma once

#include <string>

#include <json.hpp>

#include "jamlab/common/error.hpp"

namespace jamlab {

using Json = nlohmann::json;

// Overwrites `value` with j[key] when present; wrong types raise config-parse.
template <typename T>
void read_opt(const Json& j, const char* key, T& value) {
  if (!j.contains(key)) return;
  try {
    value = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config_parse, std::string("key '") + key + "': " + e.what());
  }
}

}  // namespace jamlab
