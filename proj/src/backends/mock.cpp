#include "objvoice/backends/mock.hpp"

#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string_view>

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::backends {

namespace fs = std::filesystem;

namespace {

cv::Mat view_rgb(const protocol::ScopeFrame& frame) {
  return cv::Mat(frame.height, frame.width, CV_8UC3, const_cast<std::uint8_t*>(frame.pixels.data()));
}

cv::Mat view_tile(const util::RgbTile& tile) {
  return cv::Mat(tile.height, tile.width, CV_8UC3, const_cast<std::uint8_t*>(tile.rgb.data()));
}

std::uint64_t fnv1a(std::uint64_t h, std::span<const std::uint8_t> bytes) {
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------- segmenter

std::vector<vision::MaskCandidate> MockSegmenter::segment(const protocol::ScopeFrame& frame) {
  protocol::validate_frame(frame, false);
  cv::Mat hsv, binary, labels, stats, centroids;
  cv::cvtColor(view_rgb(frame), hsv, cv::COLOR_RGB2HSV);
  cv::inRange(hsv, cv::Scalar(0, options_.min_saturation, options_.min_value),
              cv::Scalar(180, 255, 255), binary);
  const int n = cv::connectedComponentsWithStats(binary, labels, stats, centroids, 8, CV_32S);

  std::vector<std::pair<int, int>> components;  // (area, label)
  for (int label = 1; label < n; ++label) {
    const int area = stats.at<int>(label, cv::CC_STAT_AREA);
    if (area >= options_.min_area) components.emplace_back(area, label);
  }
  std::sort(components.begin(), components.end(), [](auto a, auto b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (components.size() > options_.max_candidates) components.resize(options_.max_candidates);

  const double total = static_cast<double>(frame.width) * frame.height;
  std::vector<vision::MaskCandidate> out;
  for (auto [area, label] : components) {
    vision::MaskCandidate c{vision::Mask(frame.width, frame.height), area / total};
    for (int y = 0; y < frame.height; ++y) {
      const int* row = labels.ptr<int>(y);
      for (int x = 0; x < frame.width; ++x) {
        if (row[x] == label) c.mask.set(x, y);
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------- detector

std::vector<vision::Detection> mock_detector_match(const protocol::ScopeFrame& frame,
                                                   std::span<const ClassTemplate> templates) {
  const cv::Mat image = view_rgb(frame);
  std::vector<vision::Detection> out;
  for (const auto& t : templates) {
    if (t.tile.width > frame.width || t.tile.height > frame.height) continue;
    cv::Mat scores;
    cv::matchTemplate(image, view_tile(t.tile), scores, cv::TM_CCOEFF_NORMED);
    double best = 0.0;
    cv::Point at;
    cv::minMaxLoc(scores, nullptr, &best, nullptr, &at);
    if (!std::isfinite(best)) best = 0.0;

    vision::Detection d;
    d.class_id = t.class_id;
    d.confidence = std::clamp(best, 0.0, 1.0);
    d.bbox = vision::BBox{(at.x + t.tile.width / 2.0) / frame.width,
                          (at.y + t.tile.height / 2.0) / frame.height,
                          static_cast<double>(t.tile.width) / frame.width,
                          static_cast<double>(t.tile.height) / frame.height};
    out.push_back(d);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.confidence > b.confidence;
  });
  return out;
}

vision::ModelHandle MockTrainer::train(const vision::Dataset& dataset, const TrainOptions& options,
                                       const vision::ModelHandle* pretrained) {
  if (options.epochs < 1 || options.patience < 0) {
    throw Error(Errc::TrainerFailure, "invalid epoch budget");
  }
  std::vector<ClassTemplate> prior;
  if (pretrained != nullptr) prior = load_templates(*pretrained);

  std::vector<ClassTemplate> templates;
  const std::vector<vision::AnnotatedSample>* splits[] = {&dataset.train, &dataset.val, &dataset.test};
  for (std::uint32_t cls = 0; cls < dataset.class_names.size(); ++cls) {
    const vision::AnnotatedSample* source = nullptr;
    for (const auto* split : splits) {
      auto it = std::find_if(split->begin(), split->end(),
                             [&](const auto& s) { return s.class_id == cls; });
      if (it != split->end()) {
        source = &*it;
        break;
      }
    }
    if (source != nullptr) {
      const auto& f = *source->frame;
      const auto rect = vision::to_pixels(source->bbox, f.width, f.height);
      if (rect.width() <= 0 || rect.height() <= 0) throw Error(Errc::TrainerFailure, "degenerate box");
      ClassTemplate t{cls, util::RgbTile{rect.width(), rect.height(), {}}};
      t.tile.rgb.reserve(static_cast<std::size_t>(rect.width()) * rect.height() * 3);
      for (int y = rect.y0; y < rect.y1; ++y) {
        const std::uint8_t* row = f.pixel(rect.x0, y);
        t.tile.rgb.insert(t.tile.rgb.end(), row, row + rect.width() * 3);
      }
      templates.push_back(std::move(t));
    } else if (cls < prior.size()) {
      templates.push_back(prior[cls]);
    } else {
      throw Error(Errc::TrainerFailure, "no samples for class " + dataset.class_names[cls]);
    }
  }

  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& t : templates) h = fnv1a(h, util::encode_tile(t.tile));
  for (const auto& name : dataset.class_names) {
    h = fnv1a(h, std::span(reinterpret_cast<const std::uint8_t*>(name.data()), name.size()));
  }
  char id[48];
  std::snprintf(id, sizeof(id), "mock-%zuc-%012llx", dataset.class_names.size(),
                static_cast<unsigned long long>(h & 0xFFFFFFFFFFFFULL));

  vision::ModelHandle model;
  model.id = id;
  model.class_names = dataset.class_names;
  model.location = models_root_ / model.id;
  for (const auto& t : templates) {
    util::write_tile(model.location / "templates" / (std::to_string(t.class_id) + ".rgb"), t.tile);
  }

  // Pseudo validation curve: improves until best_epoch, then plateaus; fine
  // tuning from a pretrained model converges earlier.
  const int n = static_cast<int>(dataset.class_names.size());
  model.best_epoch = std::min(options.epochs, (pretrained ? 20 : 30) + 5 * n);
  model.epochs_run = std::min(options.epochs, model.best_epoch + options.patience);
  return model;
}

std::vector<ClassTemplate> load_templates(const vision::ModelHandle& model) {
  std::vector<ClassTemplate> out;
  for (std::uint32_t cls = 0; cls < model.class_names.size(); ++cls) {
    const fs::path path = model.location / "templates" / (std::to_string(cls) + ".rgb");
    out.push_back(ClassTemplate{cls, util::read_tile(path)});
  }
  return out;
}

std::shared_ptr<const std::vector<ClassTemplate>> MockDetector::templates_for(
    const vision::ModelHandle& model) {
  std::lock_guard lock(mu_);
  auto& slot = cache_[model.id];
  if (!slot) slot = std::make_shared<const std::vector<ClassTemplate>>(load_templates(model));
  return slot;
}

std::vector<vision::Detection> MockDetector::detect(const protocol::ScopeFrame& frame,
                                                    const vision::ModelHandle& model) {
  auto templates = templates_for(model);
  auto out = mock_detector_match(frame, *templates);
  const double cost = cost_.base_ms + cost_.per_class_ms * static_cast<double>(templates->size());
  clock_.sleep_for(Micros(std::llround(cost * 1000.0)));
  return out;
}

// ---------------------------------------------------------------- persona

int dominant_hue_bin(const protocol::ScopeFrame& frame) {
  cv::Mat hsv;
  cv::cvtColor(view_rgb(frame), hsv, cv::COLOR_RGB2HSV);
  std::array<std::size_t, 12> bins{};
  for (int y = 0; y < hsv.rows; ++y) {
    const cv::Vec3b* row = hsv.ptr<cv::Vec3b>(y);
    for (int x = 0; x < hsv.cols; ++x) {
      if (row[x][1] >= 90 && row[x][2] >= 40) ++bins[((row[x][0] + 7) / 15) % 12];
    }
  }
  auto it = std::max_element(bins.begin(), bins.end());
  return *it == 0 ? -1 : static_cast<int>(it - bins.begin());
}

namespace {

struct PersonaRule {
  const char* name[2];
  const char* gender[2];
  const char* age[2];
  const char* personality[2];
  const char* backstory[2];
  persona::VoiceId voice;
};

// Index 12 is the fallback for frames without a saturated object.
const PersonaRule kRules[13] = {
    {{"Mugsy", "杯杯"}, {"male", "男"}, {"about 30", "三十岁左右"},
     {"Warm and steady, always ready with a comforting word and a dry joke.",
      "温暖又沉稳，总能说出安慰人的话，偶尔来点冷幽默。"},
     {"Mugsy has started every morning with you, holding coffee through deadlines and late nights.",
      "杯杯陪你度过了每一个早晨，在赶工和熬夜时一直盛着你的咖啡。"},
     persona::VoiceId::YoungMale},
    {{"Punky", "南瓜仔"}, {"female", "女"}, {"a young child", "小朋友"},
     {"Giggly and mischievous, loves games and surprises.", "爱笑又调皮，喜欢游戏和惊喜。"},
     {"Punky was won at an autumn fair and has guarded the desk corner ever since.",
      "南瓜仔是在秋天的集市上赢来的，从那以后就一直守着书桌的一角。"},
     persona::VoiceId::ChildFemale},
    {{"Fuzz", "毛毛球"}, {"male", "男"}, {"a lively kid", "活泼的孩子"},
     {"Bouncy and competitive, never stops talking about the next match.",
      "蹦蹦跳跳、好胜心强，总在念叨下一场比赛。"},
     {"Fuzz survived a hundred rallies and still dreams of a championship point.",
      "毛毛球经历过上百次对打，仍然梦想着赛点。"},
     persona::VoiceId::ChildMale},
    {{"Sunny", "阳阳"}, {"neutral", "中性"}, {"timeless", "没有年龄"},
     {"Cheerful and curious about everything around it.", "开朗，对周围的一切都充满好奇。"},
     {"Sunny appeared one bright afternoon and never left.", "阳阳在一个晴朗的下午出现，从此再没离开。"},
     persona::VoiceId::Neutral},
    {{"Fern", "蕨奶奶"}, {"female", "女"}, {"ancient", "很老很老"},
     {"Patient and wise, speaks slowly and loves to give gentle advice.",
      "耐心而睿智，说话慢条斯理，喜欢给出温柔的建议。"},
     {"Fern has grown on the windowsill for years, watching seasons come and go.",
      "蕨奶奶在窗台上生长了许多年，看着四季来来去去。"},
     persona::VoiceId::ElderlyFemale},
    {{"Minty", "薄荷"}, {"female", "女"}, {"early twenties", "二十出头"},
     {"Fresh, quick-witted and a little sarcastic.", "清爽机灵，带一点点毒舌。"},
     {"Minty rolled in with the groceries and decided to stay.", "薄荷跟着买菜的袋子来到家里，就决定留下了。"},
     persona::VoiceId::YoungFemale},
    {{"Palette", "调色板"}, {"female", "女"}, {"about 25", "二十五岁左右"},
     {"Dreamy and artistic, sees a painting in every moment.", "爱幻想、富有艺术气息，每个瞬间都能看成一幅画。"},
     {"Palette has held every colour of your unfinished paintings.", "调色板承载过你所有未完成画作的颜色。"},
     persona::VoiceId::YoungFemale},
    {{"Inky", "墨墨"}, {"male", "男"}, {"about 60", "六十岁左右"},
     {"Thoughtful and a bit nostalgic, remembers every note you ever wrote.",
      "深思熟虑又有些怀旧，记得你写下的每一条笔记。"},
     {"Inky has kept your plans, lists and doodles safe for many years.",
      "墨墨多年来一直保管着你的计划、清单和涂鸦。"},
     persona::VoiceId::ElderlyMale},
    {{"Skye", "小天"}, {"neutral", "中性"}, {"hard to say", "说不清"},
     {"Calm and airy, likes to think out loud.", "平静又轻盈，喜欢自言自语地思考。"},
     {"Skye drifted onto the desk like a small cloud.", "小天像一朵小云一样飘到了桌上。"},
     persona::VoiceId::Neutral},
    {{"Figaro", "费加罗"}, {"male", "男"}, {"young at heart", "心态年轻"},
     {"Dramatic and theatrical, narrates everything like a hero's tale.",
      "戏剧化又夸张，把每件事都讲成英雄传奇。"},
     {"Figaro stood guard on the shelf through countless adventures.",
      "费加罗在书架上守护了无数次冒险。"},
     persona::VoiceId::YoungMale},
    {{"Violet", "紫罗兰"}, {"female", "女"}, {"elderly", "年长"},
     {"Elegant and gentle, with old-fashioned manners.", "优雅温柔，带着老派的礼貌。"},
     {"Violet came from a grandmother's dresser long ago.", "紫罗兰很久以前来自祖母的梳妆台。"},
     persona::VoiceId::ElderlyFemale},
    {{"Ruby", "红红"}, {"female", "女"}, {"about 25", "二十五岁左右"},
     {"Confident and glamorous, always encouraging you to shine.", "自信又迷人，总是鼓励你闪闪发光。"},
     {"Ruby has been in your bag for every important day.", "每个重要的日子，红红都在你的包里。"},
     persona::VoiceId::YoungFemale},
    {{"Pebble", "石头"}, {"neutral", "中性"}, {"very old", "非常古老"},
     {"Quiet and steady, says little but means it.", "安静沉稳，话不多但句句真心。"},
     {"Pebble has simply always been here.", "石头好像一直都在这里。"},
     persona::VoiceId::Neutral},
};

}  // namespace

std::string MockPersonaGenerator::generate(const PersonaRequest& request) {
  const int bin = dominant_hue_bin(request.frame);
  const PersonaRule& rule = kRules[bin < 0 ? 12 : bin];
  const int lang = request.language == persona::Language::Chinese ? 1 : 0;
  nlohmann::ordered_json doc;
  doc["name"] = rule.name[lang];
  doc["gender"] = rule.gender[lang];
  doc["age"] = rule.age[lang];
  doc["personality"] = rule.personality[lang];
  doc["backstory"] = rule.backstory[lang];
  doc["voice"] = std::string(persona::to_string(rule.voice));
  doc["language"] = std::string(persona::to_string(request.language));
  return doc.dump();
}

// ---------------------------------------------------------------- speech

std::string MockTranscriber::transcribe(const dialogue::PcmAudio& audio, persona::Language) {
  return audio.annotation;
}

std::string MockChat::complete(const dialogue::ChatRequest& request) {
  const bool zh = request.language == persona::Language::Chinese;
  const std::string& marker = request.marker;
  std::string last_user;
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role == "user") {
      last_user = it->content;
      break;
    }
  }
  const bool terminated = !last_user.empty() && std::string_view(".?!").find(last_user.back()) !=
                                                   std::string_view::npos;
  std::string reply = zh ? request.persona_name + "听到了：" + last_user + "。" + marker
                         : request.persona_name + " hears: " + last_user + (terminated ? "" : ".") +
                               marker;
  if (sentences_ > 0) {
    for (std::size_t i = 2; i <= sentences_; ++i) {
      reply += zh ? "这是第" + std::to_string(i) + "句话。" + marker
                  : "This is sentence " + std::to_string(i) + "." + marker;
    }
    return reply;
  }
  // messages = system + history + new user message
  const std::size_t remembered = request.messages.size() >= 2 ? request.messages.size() - 2 : 0;
  if (remembered > 0) {
    reply += zh ? "我还记得之前的" + std::to_string(remembered) + "条消息。" + marker
                : "I remember " + std::to_string(remembered) + " earlier messages." + marker;
  }
  return reply;
}

double MockSynthesizer::frequency_hz(persona::VoiceId voice) {
  switch (voice) {
    case persona::VoiceId::ElderlyFemale: return 196.0;
    case persona::VoiceId::YoungFemale: return 262.0;
    case persona::VoiceId::ChildFemale: return 330.0;
    case persona::VoiceId::ElderlyMale: return 98.0;
    case persona::VoiceId::YoungMale: return 131.0;
    case persona::VoiceId::ChildMale: return 294.0;
    case persona::VoiceId::Neutral: return 220.0;
  }
  return 220.0;
}

std::vector<std::int16_t> MockSynthesizer::synthesize(std::string_view text, persona::VoiceId voice,
                                                      persona::Language) {
  const std::size_t chars = util::utf8_length(text);
  const double f = frequency_hz(voice);
  std::vector<std::int16_t> samples(chars * kSamplesPerChar);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double phase = 2.0 * std::numbers::pi * f * static_cast<double>(n) / dialogue::kSampleRate;
    samples[n] = static_cast<std::int16_t>(std::lround(6000.0 * std::sin(phase)));
  }
  clock_.sleep_for(Micros(std::llround(synth_ms_per_char_ * 1000.0 * static_cast<double>(chars))));
  return samples;
}

CapabilitySet make_mock_capabilities(Clock& clock, const fs::path& models_root) {
  CapabilitySet caps;
  caps.segmenter = std::make_shared<MockSegmenter>();
  caps.trainer = std::make_shared<MockTrainer>(models_root);
  caps.detector = std::make_shared<MockDetector>(clock);
  caps.persona_generator = std::make_shared<MockPersonaGenerator>();
  caps.transcriber = std::make_shared<MockTranscriber>();
  caps.chat = std::make_shared<MockChat>();
  caps.synthesizer = std::make_shared<MockSynthesizer>(clock);
  return caps;
}

}  // namespace objvoice::backends
