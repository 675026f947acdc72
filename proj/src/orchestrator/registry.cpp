#include "objvoice/orchestrator/registry.hpp"

#include <json.hpp>

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::orchestrator {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const ObjectProfile& ObjectRegistry::get(std::uint32_t class_id) const {
  auto it = profiles_.find(class_id);
  if (it == profiles_.end()) throw Error(Errc::NotFound, "no object " + std::to_string(class_id));
  return it->second;
}

void ObjectRegistry::add(ObjectProfile profile) {
  if (profile.class_id != next_class_id()) {
    throw Error(Errc::InvalidArgument, "class ids must be assigned densely");
  }
  profiles_.emplace(profile.class_id, std::move(profile));
}

void ObjectRegistry::set_active(std::optional<std::uint32_t> class_id) {
  if (class_id && !contains(*class_id)) {
    throw Error(Errc::NotFound, "no object " + std::to_string(*class_id));
  }
  active_ = class_id;
}

std::string ObjectRegistry::to_document() const {
  ordered_json list = ordered_json::array();
  for (const auto& [id, p] : profiles_) {
    list.push_back({{"class_id", p.class_id},
                    {"label", p.label},
                    {"persona", p.persona_path.generic_string()},
                    {"history", p.history_path.generic_string()},
                    {"registered_at", p.registered_at_ms}});
  }
  return ordered_json{{"objects", list}}.dump(2) + "\n";
}

ObjectRegistry ObjectRegistry::from_document(std::string_view document) {
  const ordered_json doc = ordered_json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::ParseError, "registry is not a JSON object");
  ObjectRegistry registry;
  try {
    for (const auto& o : doc.at("objects")) {
      ObjectProfile p;
      p.class_id = o.at("class_id").get<std::uint32_t>();
      p.label = o.at("label").get<std::string>();
      p.persona_path = o.at("persona").get<std::string>();
      p.history_path = o.at("history").get<std::string>();
      p.registered_at_ms = o.at("registered_at").get<std::int64_t>();
      registry.add(std::move(p));
    }
  } catch (const ordered_json::exception& e) {
    throw Error(Errc::ParseError, std::string("registry: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::ParseError, "registry: " + e.detail());
  }
  return registry;
}

ObjectRegistry Workspace::load_registry() const {
  if (!fs::exists(registry_path())) return {};
  return ObjectRegistry::from_document(util::read_text(registry_path()));
}

void Workspace::save_registry(const ObjectRegistry& registry) const {
  util::write_atomic(registry_path(), registry.to_document());
}

std::optional<vision::ModelHandle> Workspace::load_model() const {
  if (!fs::exists(model_path())) return std::nullopt;
  const ordered_json doc = ordered_json::parse(util::read_text(model_path()), nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::ParseError, "model.json is not JSON");
  try {
    vision::ModelHandle model;
    model.id = doc.at("id").get<std::string>();
    model.class_names = doc.at("class_names").get<std::vector<std::string>>();
    const fs::path location = doc.at("location").get<std::string>();
    model.location = location.empty() || location.is_absolute() ? location : root / location;
    model.epochs_run = doc.at("epochs_run").get<int>();
    model.best_epoch = doc.at("best_epoch").get<int>();
    return model;
  } catch (const ordered_json::exception& e) {
    throw Error(Errc::ParseError, std::string("model.json: ") + e.what());
  }
}

void Workspace::save_model(const vision::ModelHandle& model) const {
  fs::path location = model.location;
  if (!location.empty()) {
    const fs::path rel = location.lexically_relative(root);
    if (!rel.empty() && *rel.begin() != "..") location = rel;
  }
  ordered_json doc = {{"id", model.id},
                      {"class_names", model.class_names},
                      {"location", location.generic_string()},
                      {"epochs_run", model.epochs_run},
                      {"best_epoch", model.best_epoch}};
  util::write_atomic(model_path(), doc.dump(2) + "\n");
}

}  // namespace objvoice::orchestrator
