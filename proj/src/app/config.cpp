#include "objvoice/app/config.hpp"

#include <json.hpp>

#include <cstdlib>

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::app {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(Errc::InvalidArgument, key + ": " + why);
}

void apply_backend(backends::BackendConfig& c, const json& doc, const std::string& key) {
  if (!doc.is_object()) bad(key, "must be an object");
  if (doc.contains("kind")) {
    auto kind = backends::parse_backend_kind(doc["kind"].get<std::string>());
    if (!kind) bad(key + ".kind", "expected MOCK or HTTP");
    c.kind = *kind;
  }
  if (doc.contains("endpoint")) c.endpoint = protocol::Endpoint::parse(doc["endpoint"].get<std::string>());
  if (doc.contains("api_key_env")) c.api_key_env = doc["api_key_env"].get<std::string>();
  if (doc.contains("timeout_ms")) c.timeout_ms = doc["timeout_ms"].get<int>();
  if (doc.contains("retries")) c.retries = doc["retries"].get<int>();
}

persona::Language parse_language_or_throw(const std::string& key, const std::string& value) {
  auto lang = persona::parse_language(value);
  if (!lang) bad(key, "expected en or zh, got '" + value + "'");
  return *lang;
}

void set_all_kinds(AppConfig& config, const std::string& key, const std::string& value) {
  auto kind = backends::parse_backend_kind(value);
  if (!kind) bad(key, "expected mock or http, got '" + value + "'");
  for (auto& slot : config.backends.slots) slot.kind = *kind;
}

void set_all_endpoints(AppConfig& config, const std::string& value) {
  const auto endpoint = protocol::Endpoint::parse(value);
  for (auto& slot : config.backends.slots) slot.endpoint = endpoint;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    T out;
    if constexpr (std::is_floating_point_v<T>) {
      out = static_cast<T>(std::stod(value, &used));
    } else {
      out = static_cast<T>(std::stoll(value, &used));
    }
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    bad(key, "not a number: '" + value + "'");
  }
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str()); v != nullptr) return std::string(v);
  return std::nullopt;
}

void apply_config_document(AppConfig& config, std::string_view document) {
  const json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) bad("config", "not a JSON object");
  try {
    auto& s = config.session;
    if (doc.contains("data_dir")) config.data_dir = doc["data_dir"].get<std::string>();
    if (doc.contains("language")) {
      config.language = parse_language_or_throw("language", doc["language"].get<std::string>());
    }
    if (doc.contains("backends")) {
      const json& b = doc["backends"];
      if (!b.is_object()) bad("backends", "must be an object");
      if (b.contains("default")) {
        for (auto& slot : config.backends.slots) apply_backend(slot, b["default"], "backends.default");
      }
      for (const auto& [name, value] : b.items()) {
        if (name == "default") continue;
        try {
          apply_backend(config.backends.at(name), value, "backends." + name);
        } catch (const Error& e) {
          if (e.code() == Errc::InvalidArgument && e.detail().rfind("unknown capability", 0) == 0) {
            bad("backends." + name, "unknown capability slot");
          }
          throw;
        }
      }
    }
    if (doc.contains("confidence_threshold")) s.confidence_threshold = doc["confidence_threshold"].get<double>();
    if (doc.contains("grace_period_ms")) s.grace_period = std::chrono::milliseconds(doc["grace_period_ms"].get<std::int64_t>());
    if (doc.contains("max_recording_ms")) s.max_recording = std::chrono::milliseconds(doc["max_recording_ms"].get<std::int64_t>());
    if (doc.contains("marker")) s.marker = doc["marker"].get<std::string>();
    if (doc.contains("parallelism")) s.parallelism = doc["parallelism"].get<std::size_t>();
    if (doc.contains("epochs")) s.train.epochs = doc["epochs"].get<int>();
    if (doc.contains("patience")) s.train.patience = doc["patience"].get<int>();
    if (doc.contains("temperature")) s.temperature = doc["temperature"].get<double>();
    if (doc.contains("max_tokens")) s.max_tokens = doc["max_tokens"].get<int>();
  } catch (const json::exception& e) {
    bad("config", e.what());
  }
}

AppConfig resolve_config(const ConfigFlags& flags, const EnvLookup& env) {
  AppConfig config;
  if (flags.config_file) apply_config_document(config, util::read_text(*flags.config_file));

  if (auto v = env("OBJVOICE_BACKENDS")) set_all_kinds(config, "OBJVOICE_BACKENDS", *v);
  if (auto v = env("OBJVOICE_BACKEND_ENDPOINT")) set_all_endpoints(config, *v);
  if (auto v = env("OBJVOICE_DATA_DIR")) config.data_dir = *v;
  if (auto v = env("OBJVOICE_LANGUAGE")) config.language = parse_language_or_throw("OBJVOICE_LANGUAGE", *v);
  if (auto v = env("OBJVOICE_CONFIDENCE_THRESHOLD")) {
    config.session.confidence_threshold = parse_number<double>("OBJVOICE_CONFIDENCE_THRESHOLD", *v);
  }
  if (auto v = env("OBJVOICE_GRACE_PERIOD_MS")) {
    config.session.grace_period =
        std::chrono::milliseconds(parse_number<std::int64_t>("OBJVOICE_GRACE_PERIOD_MS", *v));
  }
  if (auto v = env("OBJVOICE_MARKER")) config.session.marker = *v;
  if (auto v = env("OBJVOICE_PARALLELISM")) {
    config.session.parallelism = parse_number<std::size_t>("OBJVOICE_PARALLELISM", *v);
  }

  if (flags.backends) set_all_kinds(config, "--backends", *flags.backends);
  if (flags.backend_endpoint) set_all_endpoints(config, *flags.backend_endpoint);
  if (flags.data_dir) config.data_dir = *flags.data_dir;
  if (flags.language) config.language = parse_language_or_throw("--language", *flags.language);

  const auto& s = config.session;
  if (s.confidence_threshold < 0.0 || s.confidence_threshold > 1.0) {
    bad("confidence_threshold", "must lie in [0, 1]");
  }
  if (s.parallelism == 0) bad("parallelism", "must be >= 1");
  if (s.marker.empty()) bad("marker", "must not be empty");
  if (s.grace_period.count() < 0) bad("grace_period_ms", "must be >= 0");
  for (std::size_t i = 0; i < config.backends.slots.size(); ++i) {
    try {
      config.backends.slots[i].validate();
    } catch (const Error& e) {
      bad("backends." + std::string(backends::kCapabilitySlots[i]), e.detail());
    }
  }
  return config;
}

}  // namespace objvoice::app
