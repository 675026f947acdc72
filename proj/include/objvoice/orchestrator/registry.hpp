#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "objvoice/vision/model.hpp"

namespace objvoice::orchestrator {

struct ObjectProfile {
  std::uint32_t class_id = 0;
  std::string label;
  std::filesystem::path persona_path;  // relative to the workspace root
  std::filesystem::path history_path;  // relative to the workspace root
  std::int64_t registered_at_ms = 0;

  friend bool operator==(const ObjectProfile&, const ObjectProfile&) = default;
};

// Every object the user has been introduced to. Class ids are dense: the
// n-th acquaintance gets class id n-1.
class ObjectRegistry {
 public:
  std::size_t size() const { return profiles_.size(); }
  bool empty() const { return profiles_.empty(); }
  bool contains(std::uint32_t class_id) const { return profiles_.count(class_id) != 0; }
  // Throws Error(NotFound).
  const ObjectProfile& get(std::uint32_t class_id) const;
  const std::map<std::uint32_t, ObjectProfile>& profiles() const { return profiles_; }
  std::uint32_t next_class_id() const { return static_cast<std::uint32_t>(profiles_.size()); }

  // Throws Error(InvalidArgument) unless profile.class_id == next_class_id().
  void add(ObjectProfile profile);

  std::optional<std::uint32_t> active() const { return active_; }
  // Throws Error(NotFound) for unregistered ids.
  void set_active(std::optional<std::uint32_t> class_id);

  // Profiles only; the active object is session state.
  std::string to_document() const;
  // Throws Error(ParseError).
  static ObjectRegistry from_document(std::string_view document);

  friend bool operator==(const ObjectRegistry& a, const ObjectRegistry& b) {
    return a.profiles_ == b.profiles_;
  }

 private:
  std::map<std::uint32_t, ObjectProfile> profiles_;
  std::optional<std::uint32_t> active_;
};

// On-disk layout of one user's engine state:
//
//   registry.json          object profiles
//   model.json             current detector handle
//   personas/<id>.json     persona documents
//   history/<id>.json      chat histories
//   datasets/<id>/         annotated acquaintance frames
//   models/                backend model artifacts
struct Workspace {
  std::filesystem::path root;

  std::filesystem::path registry_path() const { return root / "registry.json"; }
  std::filesystem::path model_path() const { return root / "model.json"; }
  std::filesystem::path datasets_dir() const { return root / "datasets"; }
  std::filesystem::path dataset_dir(std::uint32_t class_id) const {
    return datasets_dir() / std::to_string(class_id);
  }
  std::filesystem::path models_dir() const { return root / "models"; }

  // Missing file -> empty registry.
  ObjectRegistry load_registry() const;
  void save_registry(const ObjectRegistry& registry) const;

  // Missing file -> nullopt. Artifact locations are stored relative to
  // root when they live under it.
  std::optional<vision::ModelHandle> load_model() const;
  void save_model(const vision::ModelHandle& model) const;
};

}  // namespace objvoice::orchestrator
