#include "objvoice/backends/http.hpp"

#include <httplib.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "objvoice/backends/mock.hpp"
#include "objvoice/error.hpp"
#include "objvoice/util/base64.hpp"

namespace objvoice::backends {

using nlohmann::json;

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::Http ? "HTTP" : "MOCK";
}

std::optional<BackendKind> parse_backend_kind(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "MOCK") return BackendKind::Mock;
  if (upper == "HTTP") return BackendKind::Http;
  return std::nullopt;
}

void BackendConfig::validate() const {
  if (kind == BackendKind::Http && !endpoint) {
    throw Error(Errc::InvalidArgument, "HTTP backend requires an endpoint");
  }
  if (retries < 0) throw Error(Errc::InvalidArgument, "retries must be >= 0");
  if (timeout_ms <= 0) throw Error(Errc::InvalidArgument, "timeout_ms must be > 0");
}

BackendConfig& BackendsConfig::at(std::string_view slot) {
  return const_cast<BackendConfig&>(std::as_const(*this).at(slot));
}

const BackendConfig& BackendsConfig::at(std::string_view slot) const {
  for (std::size_t i = 0; i < kCapabilitySlots.size(); ++i) {
    if (kCapabilitySlots[i] == slot) return slots[i];
  }
  throw Error(Errc::InvalidArgument, "unknown capability slot: " + std::string(slot));
}

BackendsConfig BackendsConfig::all(const BackendConfig& config) {
  BackendsConfig out;
  out.slots.fill(config);
  return out;
}

CapabilitySet make_capabilities(const BackendsConfig& config, Clock& clock,
                                const std::filesystem::path& models_root) {
  for (const auto& slot : config.slots) slot.validate();
  CapabilitySet mocks = make_mock_capabilities(clock, models_root);
  CapabilitySet caps;
  auto pick = [&](std::string_view slot, auto& target, const auto& mock, auto make_http) {
    const BackendConfig& c = config.at(slot);
    if (c.kind == BackendKind::Mock) {
      target = mock;
    } else {
      target = make_http(c);
    }
  };
  pick("segmenter", caps.segmenter, mocks.segmenter,
       [&](const BackendConfig& c) { return std::make_shared<HttpSegmenter>(c, clock); });
  pick("trainer", caps.trainer, mocks.trainer,
       [&](const BackendConfig& c) { return std::make_shared<HttpTrainer>(c, clock); });
  pick("detector", caps.detector, mocks.detector,
       [&](const BackendConfig& c) { return std::make_shared<HttpDetector>(c, clock); });
  pick("persona_generator", caps.persona_generator, mocks.persona_generator,
       [&](const BackendConfig& c) { return std::make_shared<HttpPersonaGenerator>(c, clock); });
  pick("transcriber", caps.transcriber, mocks.transcriber,
       [&](const BackendConfig& c) { return std::make_shared<HttpTranscriber>(c, clock); });
  pick("chat", caps.chat, mocks.chat,
       [&](const BackendConfig& c) { return std::make_shared<HttpChat>(c, clock); });
  pick("synthesizer", caps.synthesizer, mocks.synthesizer,
       [&](const BackendConfig& c) { return std::make_shared<HttpSynthesizer>(c, clock); });
  return caps;
}

// ---------------------------------------------------------------- transport

namespace {

json call_once(const BackendConfig& config, std::string_view route, const std::string& body) {
  httplib::Client cli(config.endpoint->host, config.endpoint->port);
  const auto timeout = std::chrono::milliseconds(config.timeout_ms);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);

  httplib::Headers headers;
  if (!config.api_key_env.empty()) {
    if (const char* key = std::getenv(config.api_key_env.c_str()); key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  auto res = cli.Post(std::string(route), headers, body, "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw Error(Errc::Timeout, std::string(route) + ": " + httplib::to_string(err));
    }
    throw Error(Errc::TransportError, std::string(route) + ": " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) throw RemoteError(res->status, res->body);

  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw Error(Errc::SchemaError, std::string(route) + ": reply is not JSON");
  return reply;
}

bool retryable(const Error& e) {
  if (e.code() == Errc::Timeout || e.code() == Errc::TransportError) return true;
  if (const auto* remote = dynamic_cast<const RemoteError*>(&e)) return remote->status() >= 500;
  return false;
}

const json& field(const json& doc, const char* key, json::value_t type, std::string_view route) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(Errc::SchemaError, std::string(route) + ": missing '" + key + "'");
  }
  const json& v = doc[key];
  const bool ok = v.type() == type ||
                  (type == json::value_t::number_float && v.is_number()) ||
                  (type == json::value_t::number_unsigned && v.is_number_integer() && v >= 0);
  if (!ok) throw Error(Errc::SchemaError, std::string(route) + ": bad type for '" + key + "'");
  return v;
}

vision::BBox bbox_from(const json& v, std::string_view route) {
  if (!v.is_array() || v.size() != 4 ||
      !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
    throw Error(Errc::SchemaError, std::string(route) + ": bbox must be 4 numbers");
  }
  return vision::BBox{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
}

json bbox_to(const vision::BBox& b) { return json::array({b.cx, b.cy, b.w, b.h}); }

}  // namespace

json http_call(const BackendConfig& config, std::string_view route, const json& request,
               Clock& clock) {
  if (config.kind != BackendKind::Http) {
    throw Error(Errc::InvalidArgument, "http_call on a non-HTTP backend");
  }
  config.validate();
  const std::string body = request.dump();
  for (int attempt = 0;; ++attempt) {
    try {
      return call_once(config, route, body);
    } catch (const Error& e) {
      if (attempt >= config.retries || !retryable(e)) throw;
    }
    clock.sleep_for(std::chrono::duration_cast<Micros>(kRetryBase * (1LL << attempt)));
  }
}

// ---------------------------------------------------------------- payloads

std::string encode_image_b64(const protocol::ScopeFrame& frame) {
  protocol::validate_frame(frame, false);
  cv::Mat rgb(frame.height, frame.width, CV_8UC3, const_cast<std::uint8_t*>(frame.pixels.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  std::vector<std::uint8_t> png;
  if (!cv::imencode(".png", bgr, png)) throw Error(Errc::IoFailure, "PNG encoding failed");
  return util::base64_encode(png);
}

protocol::ScopeFrame decode_image_b64(std::string_view text) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = util::base64_decode(text);
  } catch (const Error& e) {
    throw Error(Errc::SchemaError, "image: " + e.detail());
  }
  cv::Mat bgr = cv::imdecode(bytes, cv::IMREAD_COLOR);
  if (bgr.empty()) throw Error(Errc::SchemaError, "image: not a decodable image");
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  protocol::ScopeFrame frame;
  frame.width = static_cast<std::uint16_t>(rgb.cols);
  frame.height = static_cast<std::uint16_t>(rgb.rows);
  frame.pixels.assign(rgb.datastart, rgb.dataend);
  return frame;
}

std::vector<std::uint32_t> encode_mask_rle(const vision::Mask& mask) {
  std::vector<std::uint32_t> runs;
  bool current = false;
  std::uint32_t length = 0;
  for (std::uint8_t bit : mask.bits) {
    if ((bit != 0) != current) {
      runs.push_back(length);
      current = !current;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

vision::Mask decode_mask_rle(int width, int height, std::span<const std::uint32_t> runs) {
  vision::Mask mask(width, height);
  std::size_t pos = 0;
  bool value = false;
  for (std::uint32_t run : runs) {
    if (pos + run > mask.bits.size()) throw Error(Errc::SchemaError, "rle overruns the mask");
    if (value) std::fill_n(mask.bits.begin() + static_cast<std::ptrdiff_t>(pos), run, 1);
    pos += run;
    value = !value;
  }
  if (pos != mask.bits.size()) throw Error(Errc::SchemaError, "rle does not cover the mask");
  return mask;
}

// ---------------------------------------------------------------- adapters

std::vector<vision::MaskCandidate> HttpSegmenter::segment(const protocol::ScopeFrame& frame) {
  constexpr std::string_view route = "/segment";
  const json reply = http_call(config_, route, {{"image_b64", encode_image_b64(frame)}}, clock_);
  std::vector<vision::MaskCandidate> out;
  for (const json& m : field(reply, "masks", json::value_t::array, route)) {
    const double saliency = field(m, "saliency", json::value_t::number_float, route).get<double>();
    const auto runs = field(m, "rle", json::value_t::array, route).get<std::vector<std::uint32_t>>();
    out.push_back({decode_mask_rle(frame.width, frame.height, runs), saliency});
  }
  return out;
}

vision::ModelHandle HttpTrainer::train(const vision::Dataset& dataset, const TrainOptions& options,
                                       const vision::ModelHandle* pretrained) {
  constexpr std::string_view route = "/train";
  json samples = json::array();
  auto add = [&](const std::vector<vision::AnnotatedSample>& split, const char* name) {
    for (const auto& s : split) {
      samples.push_back({{"split", name},
                         {"class_id", s.class_id},
                         {"bbox", bbox_to(s.bbox)},
                         {"image_b64", encode_image_b64(*s.frame)}});
    }
  };
  add(dataset.train, "train");
  add(dataset.val, "val");
  add(dataset.test, "test");
  json request = {{"class_names", dataset.class_names},
                  {"epochs", options.epochs},
                  {"patience", options.patience},
                  {"pretrained", pretrained ? json(pretrained->id) : json(nullptr)},
                  {"samples", std::move(samples)}};
  const json reply = http_call(config_, route, request, clock_);

  vision::ModelHandle model;
  model.id = field(reply, "id", json::value_t::string, route).get<std::string>();
  model.epochs_run = field(reply, "epochs_run", json::value_t::number_unsigned, route).get<int>();
  model.best_epoch = field(reply, "best_epoch", json::value_t::number_unsigned, route).get<int>();
  model.class_names = dataset.class_names;
  if (model.id.empty()) throw Error(Errc::SchemaError, "/train: empty model id");
  return model;
}

std::vector<vision::Detection> HttpDetector::detect(const protocol::ScopeFrame& frame,
                                                    const vision::ModelHandle& model) {
  constexpr std::string_view route = "/detect";
  const json reply = http_call(
      config_, route, {{"model_id", model.id}, {"image_b64", encode_image_b64(frame)}}, clock_);
  std::vector<vision::Detection> out;
  for (const json& d : field(reply, "detections", json::value_t::array, route)) {
    vision::Detection det;
    det.class_id = field(d, "class_id", json::value_t::number_unsigned, route).get<std::uint32_t>();
    det.bbox = bbox_from(field(d, "bbox", json::value_t::array, route), route);
    det.confidence = field(d, "confidence", json::value_t::number_float, route).get<double>();
    out.push_back(det);
  }
  return out;
}

std::string HttpPersonaGenerator::generate(const PersonaRequest& request) {
  const json reply = http_call(config_, "/persona",
                               {{"image_b64", encode_image_b64(request.frame)},
                                {"language", persona::to_string(request.language)},
                                {"prompt", request.prompt}},
                               clock_);
  if (!reply.is_object()) throw Error(Errc::SchemaError, "/persona: reply is not an object");
  // Field-level checks belong to persona validation, which reports InvalidGeneration.
  return reply.dump();
}

std::string HttpTranscriber::transcribe(const dialogue::PcmAudio& audio, persona::Language language) {
  constexpr std::string_view route = "/stt";
  const auto wav = dialogue::encode_wav(audio);
  const json reply = http_call(
      config_, route,
      {{"audio_b64", util::base64_encode(wav)}, {"language", persona::to_string(language)}}, clock_);
  return field(reply, "text", json::value_t::string, route).get<std::string>();
}

std::string HttpChat::complete(const dialogue::ChatRequest& request) {
  constexpr std::string_view route = "/chat";
  const json reply = http_call(config_, route, json::parse(request.to_document()), clock_);
  return field(reply, "text", json::value_t::string, route).get<std::string>();
}

std::vector<std::int16_t> HttpSynthesizer::synthesize(std::string_view text, persona::VoiceId voice,
                                                      persona::Language language) {
  constexpr std::string_view route = "/tts";
  const json reply = http_call(config_, route,
                               {{"text", text},
                                {"voice", persona::to_string(voice)},
                                {"language", persona::to_string(language)}},
                               clock_);
  const auto& b64 = field(reply, "audio_b64", json::value_t::string, route);
  dialogue::PcmAudio audio;
  try {
    audio = dialogue::decode_wav(util::base64_decode(b64.get<std::string>()));
  } catch (const Error& e) {
    throw Error(Errc::SchemaError, "/tts: " + e.detail());
  }
  if (audio.sample_rate != dialogue::kSampleRate) {
    throw Error(Errc::SchemaError, "/tts: expected 16 kHz audio");
  }
  return std::move(audio.samples);
}

}  // namespace objvoice::backends
