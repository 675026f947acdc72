#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "objvoice/protocol/frame.hpp"
#include "objvoice/vision/geometry.hpp"

namespace objvoice::vision {

struct AnnotatedSample {
  std::shared_ptr<const protocol::ScopeFrame> frame;
  std::uint32_t class_id = 0;
  BBox bbox;
};

struct Dataset {
  std::vector<AnnotatedSample> train;
  std::vector<AnnotatedSample> val;
  std::vector<AnnotatedSample> test;
  std::vector<std::string> class_names;

  std::size_t size() const { return train.size() + val.size() + test.size(); }
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;

  friend bool operator==(const SplitSizes&, const SplitSizes&) = default;
};

inline constexpr std::size_t kMinDatasetSamples = 10;

// 7:2:1 split: test = floor(n/10), val = floor(2n/10), train takes the rest.
// Throws Error(TooFewSamples) for n < 10.
SplitSizes split_sizes(std::size_t n);

// Seeded shuffle followed by the 7:2:1 split. Every sample's class id must
// index into class_names.
Dataset build_dataset(std::vector<AnnotatedSample> samples, std::vector<std::string> class_names,
                      std::uint64_t seed);

// Union of two datasets split-by-split. The prior dataset's class list must
// be a prefix of the addition's (Error(ClassListMismatch) otherwise).
Dataset merge_datasets(const Dataset& prior, const Dataset& addition);

// "class_id cx cy w h" with six decimals.
std::string format_label_line(const AnnotatedSample& sample);

// Writes root/{train,val,test}/{images,labels} plus root/classes.txt and
// returns every path written. Throws Error(IoFailure).
std::vector<std::filesystem::path> write_annotations(const Dataset& dataset,
                                                     const std::filesystem::path& root);

// Reads a directory produced by write_annotations back into memory.
Dataset load_annotations(const std::filesystem::path& root);

}  // namespace objvoice::vision
