#include "objvoice/vision/dataset.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"
#include "objvoice/util/rng.hpp"

namespace objvoice::vision {

namespace fs = std::filesystem;

SplitSizes split_sizes(std::size_t n) {
  if (n < kMinDatasetSamples) {
    throw Error(Errc::TooFewSamples, "need at least 10 samples, got " + std::to_string(n));
  }
  SplitSizes s;
  s.test = n / 10;
  s.val = (2 * n) / 10;
  s.train = n - s.val - s.test;
  return s;
}

Dataset build_dataset(std::vector<AnnotatedSample> samples, std::vector<std::string> class_names,
                      std::uint64_t seed) {
  const SplitSizes sizes = split_sizes(samples.size());
  for (const auto& s : samples) {
    if (s.class_id >= class_names.size()) {
      throw Error(Errc::InvalidArgument, "class id " + std::to_string(s.class_id) +
                                             " outside class list of " +
                                             std::to_string(class_names.size()));
    }
    if (!is_valid(s.bbox)) throw Error(Errc::InvalidArgument, "sample bbox outside unit square");
  }
  util::Rng rng(seed);
  rng.shuffle(std::span(samples));

  Dataset ds;
  ds.class_names = std::move(class_names);
  auto it = std::make_move_iterator(samples.begin());
  ds.train.assign(it, it + static_cast<std::ptrdiff_t>(sizes.train));
  it += static_cast<std::ptrdiff_t>(sizes.train);
  ds.val.assign(it, it + static_cast<std::ptrdiff_t>(sizes.val));
  it += static_cast<std::ptrdiff_t>(sizes.val);
  ds.test.assign(it, std::make_move_iterator(samples.end()));
  return ds;
}

Dataset merge_datasets(const Dataset& prior, const Dataset& addition) {
  if (prior.class_names.size() > addition.class_names.size() ||
      !std::equal(prior.class_names.begin(), prior.class_names.end(),
                  addition.class_names.begin())) {
    throw Error(Errc::ClassListMismatch, "prior classes are not a prefix of the new class list");
  }
  Dataset out = prior;
  out.class_names = addition.class_names;
  out.train.insert(out.train.end(), addition.train.begin(), addition.train.end());
  out.val.insert(out.val.end(), addition.val.begin(), addition.val.end());
  out.test.insert(out.test.end(), addition.test.begin(), addition.test.end());
  return out;
}

std::string format_label_line(const AnnotatedSample& sample) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%u %.6f %.6f %.6f %.6f", sample.class_id, sample.bbox.cx,
                sample.bbox.cy, sample.bbox.w, sample.bbox.h);
  return buf;
}

namespace {

constexpr const char* kSplits[] = {"train", "val", "test"};

void write_png(const fs::path& path, const protocol::ScopeFrame& frame) {
  cv::Mat rgb(frame.height, frame.width, CV_8UC3, const_cast<std::uint8_t*>(frame.pixels.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr);
  } catch (const cv::Exception&) {
    ok = false;
  }
  if (!ok) throw Error(Errc::IoFailure, "cannot write image " + path.string());
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoFailure, "short write to " + path.string());
}

}  // namespace

std::vector<fs::path> write_annotations(const Dataset& dataset, const fs::path& root) {
  std::vector<fs::path> written;
  util::ensure_directory(root);
  const std::vector<AnnotatedSample>* splits[] = {&dataset.train, &dataset.val, &dataset.test};
  std::set<std::string> used;
  for (int i = 0; i < 3; ++i) {
    const fs::path images = root / kSplits[i] / "images";
    const fs::path labels = root / kSplits[i] / "labels";
    util::ensure_directory(images);
    util::ensure_directory(labels);
    for (const auto& sample : *splits[i]) {
      char name[64];
      std::snprintf(name, sizeof(name), "c%u_f%06u", sample.class_id, sample.frame->sequence);
      std::string base = name;
      for (int k = 1; used.contains(base); ++k) base = std::string(name) + "_" + std::to_string(k);
      used.insert(base);

      const fs::path image = images / (base + ".png");
      const fs::path label = labels / (base + ".txt");
      write_png(image, *sample.frame);
      write_file(label, format_label_line(sample) + "\n");
      written.push_back(image);
      written.push_back(label);
    }
  }
  std::string classes;
  for (const auto& name : dataset.class_names) classes += name + "\n";
  write_file(root / "classes.txt", classes);
  written.push_back(root / "classes.txt");
  return written;
}

Dataset load_annotations(const fs::path& root) {
  Dataset ds;
  {
    std::istringstream in(util::read_text(root / "classes.txt"));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) ds.class_names.push_back(line);
    }
  }
  std::vector<AnnotatedSample>* splits[] = {&ds.train, &ds.val, &ds.test};
  for (int i = 0; i < 3; ++i) {
    const fs::path labels = root / kSplits[i] / "labels";
    const fs::path images = root / kSplits[i] / "images";
    if (!fs::is_directory(labels)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(labels)) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& label : files) {
      AnnotatedSample s;
      std::istringstream line(util::read_text(label));
      if (!(line >> s.class_id >> s.bbox.cx >> s.bbox.cy >> s.bbox.w >> s.bbox.h)) {
        throw Error(Errc::ParseError, "bad label file " + label.string());
      }
      const fs::path image = images / (label.stem().string() + ".png");
      cv::Mat bgr = cv::imread(image.string(), cv::IMREAD_COLOR);
      if (bgr.empty()) throw Error(Errc::IoFailure, "cannot read " + image.string());
      cv::Mat rgb;
      cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
      auto frame = std::make_shared<protocol::ScopeFrame>();
      unsigned cls = 0, seq = 0;
      std::sscanf(label.stem().string().c_str(), "c%u_f%u", &cls, &seq);
      frame->sequence = seq;
      frame->width = static_cast<std::uint16_t>(rgb.cols);
      frame->height = static_cast<std::uint16_t>(rgb.rows);
      frame->pixels.assign(rgb.data, rgb.data + rgb.total() * 3);
      s.frame = std::move(frame);
      splits[i]->push_back(std::move(s));
    }
  }
  return ds;
}

}  // namespace objvoice::vision
