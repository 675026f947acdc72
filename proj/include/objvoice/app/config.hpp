#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "objvoice/backends/http.hpp"
#include "objvoice/orchestrator/session.hpp"
#include "objvoice/persona/persona.hpp"

namespace objvoice::app {

// Everything a command needs besides its own flags.
//
// Config file (JSON, every key optional):
//   {
//     "data_dir": "objvoice-data",
//     "language": "en",
//     "backends": {
//       "default": {"kind": "MOCK"},
//       "chat": {"kind": "HTTP", "endpoint": "127.0.0.1:8080",
//                "api_key_env": "OBJVOICE_CHAT_KEY", "timeout_ms": 10000, "retries": 2}
//     },
//     "confidence_threshold": 0.75, "grace_period_ms": 2000, "max_recording_ms": 30000,
//     "marker": "§", "parallelism": 2, "epochs": 100, "patience": 25,
//     "temperature": 0.7, "max_tokens": 256
//   }
//
// "default" applies to every slot not listed by name.
struct AppConfig {
  backends::BackendsConfig backends;
  orchestrator::SessionConfig session;
  std::optional<std::filesystem::path> data_dir;
  persona::Language language = persona::Language::English;
};

inline constexpr const char* kDefaultDataDir = "objvoice-data";

// Command-line values; unset fields defer to the environment and the file.
struct ConfigFlags {
  std::optional<std::filesystem::path> config_file;
  std::optional<std::string> backends;  // "mock" | "http": every slot
  std::optional<std::string> backend_endpoint;
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::string> language;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

// Resolves file, then OBJVOICE_* environment variables, then flags.
// Environment: OBJVOICE_BACKENDS, OBJVOICE_BACKEND_ENDPOINT, OBJVOICE_DATA_DIR,
// OBJVOICE_LANGUAGE, OBJVOICE_CONFIDENCE_THRESHOLD, OBJVOICE_GRACE_PERIOD_MS,
// OBJVOICE_MARKER, OBJVOICE_PARALLELISM.
// Throws Error(InvalidArgument) naming the offending key.
AppConfig resolve_config(const ConfigFlags& flags, const EnvLookup& env = process_env);

// Applies a JSON config document on top of `config`.
void apply_config_document(AppConfig& config, std::string_view document);

}  // namespace objvoice::app
