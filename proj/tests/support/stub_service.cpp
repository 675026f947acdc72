#include "stub_service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <thread>

#include "objvoice/backends/http.hpp"
#include "objvoice/backends/mock.hpp"
#include "objvoice/dialogue/audio.hpp"
#include "objvoice/error.hpp"
#include "objvoice/util/base64.hpp"

namespace objvoice::testing {

using nlohmann::json;

namespace {

struct Scripted {
  int count = 0;
  int status = 200;
  std::string body;
};

json bbox_json(const vision::BBox& b) { return json::array({b.cx, b.cy, b.w, b.h}); }

}  // namespace

struct StubService::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  VirtualClock clock;
  backends::CapabilitySet mocks;
  std::mutex mu;
  std::map<std::string, vision::ModelHandle> models;
  std::map<std::string, Scripted> scripted;
  std::map<std::string, int> delays;
  std::map<std::string, int> counts;
  std::string authorization;

  json handle(const std::string& route, const json& req) {
    if (route == "/segment") {
      const auto frame = backends::decode_image_b64(req.at("image_b64").get<std::string>());
      json masks = json::array();
      for (const auto& c : mocks.segmenter->segment(frame)) {
        masks.push_back({{"saliency", c.saliency}, {"rle", backends::encode_mask_rle(c.mask)}});
      }
      return {{"masks", masks}};
    }
    if (route == "/train") {
      vision::Dataset ds;
      ds.class_names = req.at("class_names").get<std::vector<std::string>>();
      for (const auto& s : req.at("samples")) {
        vision::AnnotatedSample sample;
        sample.frame = std::make_shared<const protocol::ScopeFrame>(
            backends::decode_image_b64(s.at("image_b64").get<std::string>()));
        sample.class_id = s.at("class_id").get<std::uint32_t>();
        const auto b = s.at("bbox");
        sample.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        const auto split = s.at("split").get<std::string>();
        (split == "train" ? ds.train : split == "val" ? ds.val : ds.test).push_back(sample);
      }
      backends::TrainOptions options{req.at("epochs").get<int>(), req.at("patience").get<int>()};
      std::optional<vision::ModelHandle> prev;
      {
        std::lock_guard lock(mu);
        if (req.at("pretrained").is_string()) prev = models.at(req.at("pretrained").get<std::string>());
      }
      auto model = mocks.trainer->train(ds, options, prev ? &*prev : nullptr);
      std::lock_guard lock(mu);
      models[model.id] = model;
      return {{"id", model.id}, {"epochs_run", model.epochs_run}, {"best_epoch", model.best_epoch}};
    }
    if (route == "/detect") {
      vision::ModelHandle model;
      {
        std::lock_guard lock(mu);
        model = models.at(req.at("model_id").get<std::string>());
      }
      const auto frame = backends::decode_image_b64(req.at("image_b64").get<std::string>());
      json dets = json::array();
      for (const auto& d : mocks.detector->detect(frame, model)) {
        dets.push_back({{"class_id", d.class_id}, {"bbox", bbox_json(d.bbox)}, {"confidence", d.confidence}});
      }
      return {{"detections", dets}};
    }
    if (route == "/persona") {
      const auto frame = backends::decode_image_b64(req.at("image_b64").get<std::string>());
      const auto lang = persona::parse_language(req.at("language").get<std::string>()).value();
      const auto prompt = req.at("prompt").get<std::string>();
      return json::parse(mocks.persona_generator->generate({frame, lang, prompt}));
    }
    if (route == "/stt") {
      const auto audio = dialogue::decode_wav(util::base64_decode(req.at("audio_b64").get<std::string>()));
      const auto lang = persona::parse_language(req.at("language").get<std::string>()).value();
      return {{"text", mocks.transcriber->transcribe(audio, lang)}};
    }
    if (route == "/chat") {
      return {{"text", mocks.chat->complete(dialogue::ChatRequest::from_document(req.dump()))}};
    }
    if (route == "/tts") {
      dialogue::PcmAudio audio;
      audio.samples = mocks.synthesizer->synthesize(
          req.at("text").get<std::string>(), persona::parse_voice(req.at("voice").get<std::string>()).value(),
          persona::parse_language(req.at("language").get<std::string>()).value());
      return {{"audio_b64", util::base64_encode(dialogue::encode_wav(audio))}};
    }
    throw std::runtime_error("unknown route");
  }
};

StubService::StubService(std::filesystem::path models_root) : impl_(std::make_unique<Impl>()) {
  impl_->mocks = backends::make_mock_capabilities(impl_->clock, models_root);
  for (auto route : {"/segment", "/train", "/detect", "/persona", "/stt", "/chat", "/tts"}) {
    impl_->server.Post(route, [this, r = std::string(route)](const httplib::Request& req, httplib::Response& res) {
      int delay = 0;
      std::optional<Scripted> scripted;
      {
        std::lock_guard lock(impl_->mu);
        ++impl_->counts[r];
        impl_->authorization = req.get_header_value("Authorization");
        delay = impl_->delays[r];
        auto it = impl_->scripted.find(r);
        if (it != impl_->scripted.end() && it->second.count > 0) {
          --it->second.count;
          scripted = it->second;
        }
      }
      if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      if (scripted) {
        res.status = scripted->status;
        res.set_content(scripted->body, "application/json");
        return;
      }
      try {
        res.set_content(impl_->handle(r, json::parse(req.body)).dump(), "application/json");
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    });
  }
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

StubService::~StubService() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

protocol::Endpoint StubService::endpoint() const {
  return {"127.0.0.1", static_cast<std::uint16_t>(impl_->port)};
}

void StubService::fail_next(const std::string& route, int count, int status, std::string body) {
  std::lock_guard lock(impl_->mu);
  impl_->scripted[route] = {count, status, std::move(body)};
}

void StubService::reply_next(const std::string& route, int count, std::string body) {
  fail_next(route, count, 200, std::move(body));
}

void StubService::set_delay_ms(const std::string& route, int ms) {
  std::lock_guard lock(impl_->mu);
  impl_->delays[route] = ms;
}

int StubService::requests(const std::string& route) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->counts.find(route);
  return it == impl_->counts.end() ? 0 : it->second;
}

std::string StubService::last_authorization() const {
  std::lock_guard lock(impl_->mu);
  return impl_->authorization;
}

}  // namespace objvoice::testing
