#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include "objvoice/util/files.hpp"

namespace objvoice::dialogue {

enum class Role { User, Object };

std::string_view to_string(Role role);  // "USER" / "OBJECT"

struct ChatRecord {
  Role role = Role::User;
  std::string text;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const ChatRecord&, const ChatRecord&) = default;
};

// An object's short-term memory: at most `capacity` records (one record is one
// message), oldest first. When an append would overflow, whole cycles are
// evicted from the front: the oldest record goes, followed by any object reply
// it leaves orphaned at the head.
class ChatHistory {
 public:
  static constexpr std::size_t kCapacity = 10;

  explicit ChatHistory(std::size_t capacity = kCapacity);

  // Throws Error(InvalidArgument) for an empty text.
  void append(ChatRecord record);

  const std::deque<ChatRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t capacity() const { return capacity_; }

  // JSON list of {role, text, timestamp}.
  std::string to_document() const;
  static ChatHistory from_document(std::string_view document,
                                   std::size_t capacity = kCapacity);

  friend bool operator==(const ChatHistory& a, const ChatHistory& b) {
    return a.records_ == b.records_;
  }

 private:
  std::size_t capacity_;
  std::deque<ChatRecord> records_;
};

ChatHistory append_with_eviction(ChatHistory history, ChatRecord record);

// root/history/<class_id>.json. Loads are served from memory while the
// file's stamp is unchanged.
class HistoryStore {
 public:
  explicit HistoryStore(std::filesystem::path root) : root_(std::move(root)) {}
  HistoryStore(const HistoryStore& other) : root_(other.root_) {}

  std::filesystem::path path_for(std::uint32_t class_id) const;
  // A class without a document has an empty history.
  ChatHistory load(std::uint32_t class_id) const;
  void save(std::uint32_t class_id, const ChatHistory& history) const;

 private:
  std::filesystem::path root_;
  mutable std::mutex cache_mu_;
  mutable std::map<std::uint32_t, std::pair<util::FileStamp, ChatHistory>> cache_;
};

}  // namespace objvoice::dialogue
