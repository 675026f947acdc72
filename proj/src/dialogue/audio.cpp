#include "objvoice/dialogue/audio.hpp"

#include <cstring>

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::dialogue {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return std::uint32_t{b[at]} | (std::uint32_t{b[at + 1]} << 8) | (std::uint32_t{b[at + 2]} << 16) |
         (std::uint32_t{b[at + 3]} << 24);
}
std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}
bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

std::vector<std::uint8_t> encode_wav(const PcmAudio& audio) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  const std::uint32_t text_bytes = static_cast<std::uint32_t>(audio.annotation.size());
  const std::uint32_t text_chunk = audio.annotation.empty() ? 0 : 8 + text_bytes + (text_bytes & 1);

  std::vector<std::uint8_t> out;
  out.reserve(44 + text_chunk + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 4 + (8 + 16) + text_chunk + (8 + data_bytes));
  put_tag(out, "WAVE");

  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);

  if (!audio.annotation.empty()) {
    put_tag(out, "utxt");
    put_u32(out, text_bytes);
    out.insert(out.end(), audio.annotation.begin(), audio.annotation.end());
    if (text_bytes & 1) out.push_back(0);
  }

  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (std::int16_t s : audio.samples) put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

PcmAudio decode_wav(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || !tag_is(b, 0, "RIFF") || !tag_is(b, 8, "WAVE")) {
    throw Error(Errc::ParseError, "not a RIFF/WAVE file");
  }
  PcmAudio audio;
  bool have_fmt = false, have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint32_t size = get_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) throw Error(Errc::ParseError, "chunk overruns file");
    if (tag_is(b, pos, "fmt ")) {
      if (size < 16 || get_u16(b, body) != 1 || get_u16(b, body + 2) != 1 ||
          get_u16(b, body + 14) != 16) {
        throw Error(Errc::ParseError, "only PCM16 mono is supported");
      }
      audio.sample_rate = static_cast<int>(get_u32(b, body + 4));
      have_fmt = true;
    } else if (tag_is(b, pos, "utxt")) {
      audio.annotation.assign(reinterpret_cast<const char*>(b.data() + body), size);
    } else if (tag_is(b, pos, "data")) {
      audio.samples.resize(size / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        audio.samples[i] = static_cast<std::int16_t>(get_u16(b, body + 2 * i));
      }
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || !have_data) throw Error(Errc::ParseError, "missing fmt or data chunk");
  return audio;
}

void write_wav(const std::filesystem::path& path, const PcmAudio& audio) {
  const auto bytes = encode_wav(audio);
  util::write_atomic(path, std::span<const std::uint8_t>(bytes));
}

}  // namespace objvoice::dialogue
