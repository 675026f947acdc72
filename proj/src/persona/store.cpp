#include "objvoice/persona/store.hpp"

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::persona {

namespace fs = std::filesystem;

PersonaStore::PersonaStore(fs::path root) : root_(std::move(root)) {}

fs::path PersonaStore::path_for(std::uint32_t class_id) const {
  return root_ / "personas" / (std::to_string(class_id) + ".json");
}

std::mutex& PersonaStore::writer_lock(std::uint32_t class_id) {
  std::lock_guard lock(locks_mu_);
  auto& slot = locks_[class_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

fs::path PersonaStore::store(std::uint32_t class_id, const Persona& persona) {
  std::lock_guard lock(writer_lock(class_id));
  const fs::path path = path_for(class_id);
  util::write_atomic(path, to_document(persona));
  std::lock_guard cache_lock(cache_mu_);
  if (auto stamp = util::file_stamp(path)) {
    cache_.insert_or_assign(class_id, std::pair{*stamp, persona});
  } else {
    cache_.erase(class_id);
  }
  return path;
}

Persona PersonaStore::load(std::uint32_t class_id) const {
  const fs::path path = path_for(class_id);
  const auto stamp = util::file_stamp(path);
  if (!stamp) throw Error(Errc::NotFound, "no persona for class " + std::to_string(class_id));
  {
    std::lock_guard lock(cache_mu_);
    auto it = cache_.find(class_id);
    if (it != cache_.end() && it->second.first == *stamp) return it->second.second;
  }
  Persona persona = validate_persona(util::read_text(path));
  std::lock_guard lock(cache_mu_);
  cache_.insert_or_assign(class_id, std::pair{*stamp, persona});
  return persona;
}

bool PersonaStore::contains(std::uint32_t class_id) const { return fs::exists(path_for(class_id)); }

void PersonaStore::remove(std::uint32_t class_id) {
  std::lock_guard lock(writer_lock(class_id));
  std::error_code ec;
  fs::remove(path_for(class_id), ec);
  std::lock_guard cache_lock(cache_mu_);
  cache_.erase(class_id);
}

}  // namespace objvoice::persona
