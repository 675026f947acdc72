#include "test_support.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <iterator>

namespace objvoice::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("objvoice-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path fixture(const std::string& relative) { return fs::path(OBJVOICE_FIXTURE_DIR) / relative; }
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

fs::path golden(const std::string& relative) { return fs::path(OBJVOICE_GOLDEN_DIR) / relative; }

std::string random_text(util::Rng& rng, std::size_t max_words) {
  static const char* kWords[] = {"hello", "little", "mug", "warm", "tea", "morning", "sun",
                                 "Why?", "yes!", "ok,", "plant", "water"};
  static const char* kHan[] = {"你好", "杯子", "早上", "阳光", "喝水", "朋友", "小猫", "。", "，", "？"};
  const std::size_t n = 1 + rng.below(max_words);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && rng.below(4) != 0) out += ' ';
    out += rng.below(2) == 0 ? kWords[rng.below(std::size(kWords))] : kHan[rng.below(std::size(kHan))];
  }
  return out;
}

persona::Persona random_persona(util::Rng& rng) {
  persona::Persona p;
  p.name = random_text(rng, 2);
  p.gender = random_text(rng, 1);
  p.age = std::to_string(rng.below(120));
  p.personality = random_text(rng, 8);
  p.backstory = random_text(rng, 30);
  if (rng.below(5) == 0) p.backstory += "\n\"quoted\"\t\\ and more";
  p.voice = persona::kAllVoices[rng.below(persona::kAllVoices.size())];
  p.language = rng.below(2) == 0 ? persona::Language::English : persona::Language::Chinese;
  return p;
}

protocol::ScopeFrame plain_frame(int side, std::uint8_t gray) {
  protocol::ScopeFrame f;
  f.width = static_cast<std::uint16_t>(side);
  f.height = static_cast<std::uint16_t>(side);
  f.pixels.assign(static_cast<std::size_t>(side) * side * 3, gray);
  return f;
}

void paint_square(protocol::ScopeFrame& frame, int x, int y, int size, std::uint8_t r,
                  std::uint8_t g, std::uint8_t b) {
  for (int yy = y; yy < y + size; ++yy) {
    for (int xx = x; xx < x + size; ++xx) {
      auto* p = frame.pixels.data() + (static_cast<std::size_t>(yy) * frame.width + xx) * 3;
      p[0] = r;
      p[1] = g;
      p[2] = b;
    }
  }
}

}  // namespace objvoice::testing
