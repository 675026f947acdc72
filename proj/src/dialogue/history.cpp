#include "objvoice/dialogue/history.hpp"

#include <json.hpp>

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::dialogue {

std::string_view to_string(Role role) { return role == Role::User ? "USER" : "OBJECT"; }

ChatHistory::ChatHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 2) throw Error(Errc::InvalidArgument, "history capacity must hold one cycle");
}

void ChatHistory::append(ChatRecord record) {
  if (record.text.empty()) throw Error(Errc::InvalidArgument, "chat record text is empty");
  if (records_.size() + 1 > capacity_) {
    records_.pop_front();
    while (!records_.empty() && records_.front().role == Role::Object) records_.pop_front();
  }
  records_.push_back(std::move(record));
}

std::string ChatHistory::to_document() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : records_) {
    nlohmann::ordered_json item;
    item["role"] = std::string(to_string(r.role));
    item["text"] = r.text;
    item["timestamp"] = r.timestamp_ms;
    doc.push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

ChatHistory ChatHistory::from_document(std::string_view document, std::size_t capacity) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
  if (!doc.is_array()) throw Error(Errc::ParseError, "history must be a JSON list");
  ChatHistory h(capacity);
  try {
    for (const auto& item : doc) {
      ChatRecord r;
      const std::string role = item.at("role").get<std::string>();
      if (role == "USER") {
        r.role = Role::User;
      } else if (role == "OBJECT") {
        r.role = Role::Object;
      } else {
        throw Error(Errc::ParseError, "unknown role " + role);
      }
      r.text = item.at("text").get<std::string>();
      r.timestamp_ms = item.at("timestamp").get<std::int64_t>();
      h.append(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return h;
}

ChatHistory append_with_eviction(ChatHistory history, ChatRecord record) {
  history.append(std::move(record));
  return history;
}

std::filesystem::path HistoryStore::path_for(std::uint32_t class_id) const {
  return root_ / "history" / (std::to_string(class_id) + ".json");
}

ChatHistory HistoryStore::load(std::uint32_t class_id) const {
  const auto path = path_for(class_id);
  const auto stamp = util::file_stamp(path);
  if (!stamp) return ChatHistory{};
  {
    std::lock_guard lock(cache_mu_);
    auto it = cache_.find(class_id);
    if (it != cache_.end() && it->second.first == *stamp) return it->second.second;
  }
  ChatHistory history = ChatHistory::from_document(util::read_text(path));
  std::lock_guard lock(cache_mu_);
  cache_.insert_or_assign(class_id, std::pair{*stamp, history});
  return history;
}

void HistoryStore::save(std::uint32_t class_id, const ChatHistory& history) const {
  const auto path = path_for(class_id);
  util::write_atomic(path, history.to_document());
  std::lock_guard lock(cache_mu_);
  if (auto stamp = util::file_stamp(path)) {
    cache_.insert_or_assign(class_id, std::pair{*stamp, history});
  } else {
    cache_.erase(class_id);
  }
}

}  // namespace objvoice::dialogue
