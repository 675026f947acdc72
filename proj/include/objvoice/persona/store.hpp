#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>

#include "objvoice/persona/persona.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::persona {

// One persona document per class id under root/personas/<class_id>.json.
// Writes to the same class id are serialized; loads may run concurrently.
// Loads are served from memory while the file's stamp is unchanged.
class PersonaStore {
 public:
  explicit PersonaStore(std::filesystem::path root);

  std::filesystem::path path_for(std::uint32_t class_id) const;

  // Throws Error(IoFailure).
  std::filesystem::path store(std::uint32_t class_id, const Persona& persona);
  // Throws Error(NotFound) for a class id that was never stored.
  Persona load(std::uint32_t class_id) const;
  bool contains(std::uint32_t class_id) const;
  void remove(std::uint32_t class_id);

  const std::filesystem::path& root() const { return root_; }

 private:
  std::mutex& writer_lock(std::uint32_t class_id);

  std::filesystem::path root_;
  std::mutex locks_mu_;
  std::map<std::uint32_t, std::unique_ptr<std::mutex>> locks_;
  mutable std::mutex cache_mu_;
  mutable std::map<std::uint32_t, std::pair<util::FileStamp, Persona>> cache_;
};

}  // namespace objvoice::persona
