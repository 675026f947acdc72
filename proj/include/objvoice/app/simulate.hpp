#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "objvoice/app/config.hpp"
#include "objvoice/devsim/scene.hpp"
#include "objvoice/devsim/wand.hpp"
#include "objvoice/dialogue/speech.hpp"
#include "objvoice/orchestrator/events.hpp"
#include "objvoice/orchestrator/session.hpp"
#include "objvoice/vision/evaluation.hpp"

namespace objvoice::app {

struct SimulationResult {
  std::vector<orchestrator::CycleReport> cycles;
  std::string transcript;  // one timestamped line per event
  dialogue::MetricsSummary summary;
  std::vector<orchestrator::SessionEvent> events;
  std::size_t record_started = 0;  // as observed by the virtual wand
  std::size_t record_rejected = 0;
  std::size_t recordings = 0;  // entries into RECORDING
};

// Plays a scripted session on a virtual clock against the workspace at
// `workspace`: the scene's acquaint steps first, then the frames from
// session_start_frame on, with wand events injected at their scripted times
// (relative to the session start).
SimulationResult run_simulation(const AppConfig& config, const devsim::SceneScript& scene,
                                const devsim::WandScript& wand, std::uint64_t seed,
                                const devsim::SpriteLibrary& sprites,
                                const std::filesystem::path& workspace);

// transcript.txt, metrics.txt, events.jsonl and audio/cycleNN_segMM.wav.
void write_simulation_outputs(const SimulationResult& result, const std::filesystem::path& out_dir);

// Acquaints the scene's objects in a fresh workspace, then evaluates n frames
// from session_start_frame on against class `truth`.
vision::DetectionReport run_evaluation(const AppConfig& config, const devsim::SceneScript& scene,
                                       std::uint32_t truth, std::uint64_t seed,
                                       const devsim::SpriteLibrary& sprites,
                                       const std::filesystem::path& workspace,
                                       std::size_t n = vision::kEvaluationFrames);

}  // namespace objvoice::app
