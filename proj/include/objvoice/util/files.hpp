#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace objvoice::util {

// All of these throw Error(IoFailure) on failure.
std::string read_text(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

// Writes to a sibling temporary and renames over the target, so readers never
// observe a half-written document.
void write_atomic(const std::filesystem::path& path, std::string_view contents);
void write_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> contents);

void ensure_directory(const std::filesystem::path& dir);

// Identity of a file's current contents as far as cheap metadata can tell.
struct FileStamp {
  std::filesystem::file_time_type modified;
  std::uintmax_t size = 0;

  friend bool operator==(const FileStamp&, const FileStamp&) = default;
};

// nullopt when the file does not exist.
std::optional<FileStamp> file_stamp(const std::filesystem::path& path);

// Number of Unicode scalar values in a UTF-8 string (continuation bytes skipped).
std::size_t utf8_length(std::string_view text);

}  // namespace objvoice::util
