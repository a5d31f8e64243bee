#include "bcd/run_config.hpp"

#include <optional>
#include <type_traits>

#include "bcd/error.hpp"
#include "bcd/io.hpp"

namespace bcd::cli {

using nlohmann::json;

namespace {

template <typename T>
struct is_optional : std::false_type {};
template <typename T>
struct is_optional<std::optional<T>> : std::true_type {};

template <typename T>
json encode(const T& value) {
  if constexpr (std::is_same_v<T, IndexMethod>) {
    return std::string(to_string(value));
  } else if constexpr (is_optional<T>::value) {
    return value ? json(*value) : json(nullptr);
  } else if constexpr (std::is_same_v<T, std::string>) {
    return value.empty() ? json(nullptr) : json(value);
  } else {
    return value;
  }
}

template <typename T>
void decode(const json& j, T& value) {
  if constexpr (std::is_same_v<T, IndexMethod>) {
    value = parse_index_method(j.get<std::string>());
  } else if constexpr (is_optional<T>::value) {
    if (j.is_null()) {
      value.reset();
    } else {
      value = j.get<typename T::value_type>();
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    value = j.is_null() ? std::string() : j.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    // get<int>() would silently truncate 2.5.
    if (!j.is_number_integer()) throw ValidationError("expected an integer");
    value = j.get<T>();
  } else {
    value = j.get<T>();
  }
}

}  // namespace

std::string_view to_string(IndexMethod method) {
  return method == IndexMethod::kMfbi ? "mfbi" : "mbi";
}

IndexMethod parse_index_method(std::string_view text) {
  if (text == "mfbi") return IndexMethod::kMfbi;
  if (text == "mbi") return IndexMethod::kMbi;
  throw ValidationError("unknown index method '" + std::string(text) +
                        "' (expected mfbi or mbi)");
}

json to_json(const RunConfig& config) {
  json j = json::object();
  for_each_field(config, [&](const char* key, FieldGroup, const char*, const auto& field) {
    j[key] = encode(field);
  });
  return j;
}

RunConfig overlay_json(const json& j, RunConfig base) {
  if (!j.is_object()) throw ValidationError("run config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for_each_field(base, [&](const char* name, FieldGroup, const char*, auto& field) {
      if (key != name) return;
      known = true;
      try {
        decode(value, field);
      } catch (const json::exception& e) {
        throw ValidationError("config key '" + key + "': " + e.what());
      } catch (const ValidationError& e) {
        throw ValidationError("config key '" + key + "': " + e.what());
      }
    });
    if (!known) throw ValidationError("unknown config key '" + key + "'");
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError("malformed config " + path.string() + ": " + e.what());
  }
  return overlay_json(j);
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path) {
  io::write_file(path, to_json(config).dump(2) + "\n");
}

}  // namespace bcd::cli
