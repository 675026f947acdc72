#include "objvoice/app/cli.hpp"

#include <CLI11.hpp>
#include <termios.h>
#include <unistd.h>

#include <atomic>
#include <csignal>
#include <iostream>
#include <thread>

#include "objvoice/app/config.hpp"
#include "objvoice/app/simulate.hpp"
#include "objvoice/devsim/scene.hpp"
#include "objvoice/devsim/wand.hpp"
#include "objvoice/error.hpp"
#include "objvoice/orchestrator/api_server.hpp"
#include "objvoice/persona/store.hpp"
#include "objvoice/protocol/channel.hpp"
#include "objvoice/protocol/frame.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::app {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void install_signal_handlers() {
  g_stop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_scene_path(const std::string& source) {
  return fs::path(source).extension() == ".json";
}

devsim::SpriteLibrary load_sprites(const std::optional<fs::path>& dir) {
  return dir ? devsim::SpriteLibrary::from_directory(*dir) : devsim::SpriteLibrary::builtin();
}

fs::path data_dir_of(const AppConfig& config) {
  return config.data_dir.value_or(fs::path(kDefaultDataDir));
}

// Restores the terminal mode on scope exit.
class RawTerminal {
 public:
  explicit RawTerminal(int fd) : fd_(fd) {
    if (tcgetattr(fd_, &saved_) != 0) return;
    termios raw = saved_;
    raw.c_lflag &= ~static_cast<tcflag_t>(ICANON | ECHO);
    raw.c_cc[VMIN] = 1;
    raw.c_cc[VTIME] = 0;
    active_ = tcsetattr(fd_, TCSANOW, &raw) == 0;
  }
  ~RawTerminal() {
    if (active_) tcsetattr(fd_, TCSANOW, &saved_);
  }

 private:
  int fd_;
  termios saved_{};
  bool active_ = false;
};

class WavSink final : public dialogue::PlaybackSink {
 public:
  WavSink(std::optional<fs::path> dir, std::size_t cycle) : dir_(std::move(dir)), cycle_(cycle) {}
  void play(const dialogue::AudioClip& clip) override {
    if (!dir_) return;
    char name[64];
    std::snprintf(name, sizeof(name), "cycle%02zu_seg%02zu.wav", cycle_, clip.segment_index);
    dialogue::PcmAudio audio;
    audio.samples = clip.samples;
    dialogue::write_wav(*dir_ / name, audio);
  }

 private:
  std::optional<fs::path> dir_;
  std::size_t cycle_;
};

void print_reply(std::ostream& out, const orchestrator::CycleReport& r) {
  if (!r.error.empty() && r.user_text.empty()) {
    out << "(" << r.error << ")\n";
  } else if (r.skipped) {
    out << "(nothing was heard)\n";
  } else {
    out << r.object_name << ": ";
    for (std::size_t i = 0; i < r.segments.size(); ++i) out << (i ? " " : "") << r.segments[i];
    out << "\n";
    if (!r.speech_ok) out << "(speech failed: " << r.error << ")\n";
  }
}

// ---------------------------------------------------------------- commands

int cmd_acquaint(const AppConfig& config, const std::string& source, std::string label,
                 std::optional<std::uint64_t> seed, const std::optional<fs::path>& sprites_dir,
                 std::ostream& out) {
  const fs::path root = data_dir_of(config);
  std::unique_ptr<Clock> clock = std::make_unique<SteadyClock>();
  auto caps = backends::make_capabilities(config.backends, *clock, root / "models");
  orchestrator::Session session(root, caps, *clock, config.session);
  if (label.empty()) label = "object" + std::to_string(session.registry().next_class_id());

  orchestrator::ObjectProfile profile;
  if (is_scene_path(source)) {
    auto scene = devsim::SceneScript::load(source);
    auto sprites = std::make_shared<const devsim::SpriteLibrary>(load_sprites(sprites_dir));
    devsim::SimulatedScope scope(scene, sprites, seed.value_or(scene.seed));
    profile = session.acquaint(scope, label, config.language);
  } else {
    protocol::HttpFrameClient scope(protocol::Endpoint::parse(source), *clock);
    profile = session.acquaint(scope, label, config.language);
  }
  const auto persona = session.personas().load(profile.class_id);
  out << "acquainted class " << profile.class_id << " (" << profile.label << ") as " << persona.name
      << "\n"
      << persona::to_document(persona);
  return kExitOk;
}

int cmd_talk(const AppConfig& config, std::uint32_t profile_id,
             const std::optional<fs::path>& audio_dir, std::istream& in, std::ostream& out,
             std::ostream& err) {
  const fs::path root = data_dir_of(config);
  SteadyClock clock;
  auto caps = backends::make_capabilities(config.backends, clock, root / "models");
  orchestrator::Session session(root, caps, clock, config.session);
  if (session.registry().empty()) {
    err << "error: no objects registered in " << root.string()
        << "; run `objvoice acquaint` first\n";
    return kExitFailure;
  }
  if (!session.registry().contains(profile_id)) {
    err << "error: no profile " << profile_id << " (registered: 0.."
        << session.registry().size() - 1 << ")\n";
    return kExitFailure;
  }
  const auto persona = session.personas().load(profile_id);
  if (audio_dir) util::ensure_directory(*audio_dir);

  dialogue::TextMicrophone mic;
  std::uint16_t seq = 0;
  std::size_t cycle = 0;
  auto one_cycle = [&](const std::string& text) {
    session.focus(profile_id);
    session.handle_wand({protocol::WandKind::TouchDown, seq++}, mic);
    mic.set_utterance(text);
    auto outcome = session.handle_wand({protocol::WandKind::TouchUp, seq++}, mic);
    if (!outcome.cycle_ready) return;
    WavSink sink(audio_dir, ++cycle);
    print_reply(out, session.complete_cycle(&sink));
  };

  const bool interactive = &in == &std::cin && isatty(STDIN_FILENO) != 0;
  out << "talking to " << persona.name << " (class " << profile_id << ")\n";
  if (!interactive) {
    std::string line;
    while (std::getline(in, line)) one_cycle(line);
    return kExitOk;
  }

  out << "press and hold: the first key starts recording, type what you say, Enter releases. "
         "Ctrl-D quits.\n"
      << std::flush;
  RawTerminal raw(STDIN_FILENO);
  std::string text;
  bool holding = false;
  char c;
  while (::read(STDIN_FILENO, &c, 1) == 1) {
    if (c == 4) break;  // Ctrl-D
    if (!holding) {
      holding = true;
      text.clear();
      out << "[recording] " << std::flush;
      if (c == '\n' || c == '\r') continue;
    }
    if (c == '\n' || c == '\r') {
      out << "\n";
      holding = false;
      one_cycle(text);
      out << std::flush;
    } else if (c == 127 || c == 8) {
      if (!text.empty()) {
        text.pop_back();
        out << "\b \b" << std::flush;
      }
    } else {
      text.push_back(c);
      out << c << std::flush;
    }
  }
  return kExitOk;
}

int cmd_simulate(const AppConfig& config, const fs::path& scene_path, const fs::path& wand_path,
                 const fs::path& out_dir, std::optional<std::uint64_t> seed,
                 const std::optional<fs::path>& sprites_dir, std::ostream& out) {
  const auto scene = devsim::SceneScript::load(scene_path);
  const auto wand = devsim::WandScript::load(wand_path);
  fs::path workspace;
  if (config.data_dir) {
    workspace = *config.data_dir;
  } else {
    workspace = out_dir / "workspace";
    fs::remove_all(workspace);
  }
  const auto result =
      run_simulation(config, scene, wand, seed.value_or(scene.seed), load_sprites(sprites_dir), workspace);
  write_simulation_outputs(result, out_dir);
  std::size_t spoken = 0;
  for (const auto& c : result.cycles) spoken += c.skipped || !c.error.empty() ? 0 : 1;
  out << "cycles=" << result.cycles.size() << " completed=" << spoken << "\n"
      << dialogue::format_metrics(result.summary) << "outputs=" << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_eval(const AppConfig& config, const fs::path& scene_path, std::uint32_t truth,
             std::size_t frames, std::optional<std::uint64_t> seed,
             const std::optional<fs::path>& sprites_dir, const std::optional<fs::path>& out_file,
             std::ostream& out) {
  const auto scene = devsim::SceneScript::load(scene_path);
  const fs::path workspace =
      fs::temp_directory_path() / ("objvoice-eval-" + std::to_string(::getpid()));
  fs::remove_all(workspace);
  vision::DetectionReport report;
  try {
    report = run_evaluation(config, scene, truth, seed.value_or(scene.seed), load_sprites(sprites_dir),
                            workspace, frames);
  } catch (...) {
    fs::remove_all(workspace);
    throw;
  }
  fs::remove_all(workspace);
  const std::string text = vision::format_report(report);
  if (out_file) util::write_atomic(*out_file, text);
  out << text;
  return kExitOk;
}

int cmd_serve(const AppConfig& config, const std::string& bind, const std::optional<std::string>& source,
              const std::optional<std::string>& wand_bind, std::optional<std::uint64_t> seed,
              const std::optional<fs::path>& sprites_dir, std::ostream& out, std::ostream& err) {
  const fs::path root = data_dir_of(config);
  SteadyClock clock;
  orchestrator::EventBus bus;
  orchestrator::CommandQueue commands;
  auto caps = backends::make_capabilities(config.backends, clock, root / "models");
  orchestrator::Session session(root, caps, clock, config.session, &bus);
  orchestrator::ApiServer api(protocol::Endpoint::parse(bind), bus, commands);

  std::unique_ptr<protocol::FrameSource> frames;
  int fps = 20;
  if (source && is_scene_path(*source)) {
    auto scene = devsim::SceneScript::load(*source);
    fps = scene.fps;
    auto sprites = std::make_shared<const devsim::SpriteLibrary>(load_sprites(sprites_dir));
    frames = std::make_unique<devsim::SimulatedScope>(scene, sprites, seed.value_or(scene.seed));
  } else if (source) {
    frames = std::make_unique<protocol::HttpFrameClient>(protocol::Endpoint::parse(*source), clock,
                                                         std::chrono::milliseconds(200));
  }
  std::unique_ptr<protocol::TcpListener> wand_listener;
  std::unique_ptr<protocol::ByteChannel> wand;
  protocol::WandStreamDecoder decoder;
  if (wand_bind) {
    wand_listener = std::make_unique<protocol::TcpListener>(protocol::Endpoint::parse(*wand_bind));
    out << "wand listener on port " << wand_listener->port() << "\n";
  }
  out << "session API on port " << api.port() << "\n" << std::flush;

  install_signal_handlers();
  dialogue::TextMicrophone mic;
  std::uint16_t ui_seq = 0;
  const auto period = std::chrono::milliseconds(1000 / std::max(fps, 1));

  auto finish = [&](const orchestrator::WandOutcome& outcome) {
    if (wand) {
      for (const auto& c : outcome.controls) wand->write(protocol::encode_control_message(c));
    }
    if (outcome.cycle_ready) session.complete_cycle();
  };

  while (!g_stop) {
    const auto tick_start = std::chrono::steady_clock::now();
    while (auto cmd = commands.pop()) {
      try {
        switch (cmd->kind) {
          case orchestrator::Command::Kind::Wand:
            finish(session.handle_wand({cmd->wand, ui_seq++}, mic));
            break;
          case orchestrator::Command::Kind::Say:
            mic.set_utterance(cmd->text);
            break;
          case orchestrator::Command::Kind::PersonaEdit:
            session.edit_persona(cmd->class_id, cmd->set);
            break;
        }
      } catch (const Error& e) {
        bus.publish("STATE", {{"state", orchestrator::to_string(session.state())}, {"error", e.what()}});
      }
    }
    if (wand_listener && (!wand || !wand->is_open())) wand = wand_listener->accept(0ms);
    if (wand && wand->is_open()) {
      for (const auto& msg : decoder.feed(wand->read(0ms))) finish(session.handle_wand(msg, mic));
    }
    if (frames) {
      try {
        session.handle_frame(frames->next_frame());
      } catch (const Error& e) {
        if (e.code() == Errc::SourceLost) {
          err << "frame source ended\n";
          frames.reset();
        }
      }
    }
    finish(session.tick(mic));
    std::this_thread::sleep_until(tick_start + period);
  }
  api.stop();
  return kExitOk;
}

int cmd_scope(const fs::path& scene_path, const std::string& bind, std::optional<std::uint64_t> seed,
              const std::optional<fs::path>& sprites_dir, bool loop, std::ostream& out) {
  const auto scene = devsim::SceneScript::load(scene_path);
  auto sprites = std::make_shared<const devsim::SpriteLibrary>(load_sprites(sprites_dir));
  protocol::FrameServer server(protocol::Endpoint::parse(bind));
  out << "scope serving " << scene.duration_frames << " frames on port " << server.port() << "\n"
      << std::flush;
  install_signal_handlers();
  const auto period = std::chrono::milliseconds(1000 / scene.fps);
  std::uint32_t sequence = 0;
  do {
    for (int i = 0; i < scene.duration_frames && !g_stop; ++i) {
      const auto start = std::chrono::steady_clock::now();
      auto frame = devsim::render_frame(scene, *sprites, i, seed.value_or(scene.seed));
      frame.sequence = sequence++;
      server.publish(std::move(frame));
      std::this_thread::sleep_until(start + period);
    }
  } while (loop && !g_stop);
  server.end_stream();
  std::this_thread::sleep_for(500ms);
  return kExitOk;
}

int cmd_wand(const fs::path& script_path, const std::string& connect, std::ostream& out) {
  const auto script = devsim::WandScript::load(script_path);
  auto channel = protocol::TcpChannel::connect(protocol::Endpoint::parse(connect));
  devsim::VirtualWand wand(script, *channel);
  const auto start = std::chrono::steady_clock::now();
  std::size_t seen = 0;
  auto report_feedback = [&] {
    wand.poll_feedback(50ms);
    for (; seen < wand.feedback().size(); ++seen) {
      const auto& msg = wand.feedback()[seen];
      out << protocol::to_string(msg.kind) << " seq=" << msg.sequence
          << (wand.vibrating() ? " (vibrating)" : "") << "\n"
          << std::flush;
    }
  };
  while (auto next = wand.next_event_ms()) {
    std::this_thread::sleep_until(start + std::chrono::milliseconds(*next));
    wand.emit_until(*next);
    report_feedback();
  }
  for (int i = 0; i < 10; ++i) report_feedback();
  return kExitOk;
}

int cmd_persona_edit(const AppConfig& config, std::uint32_t id, const std::vector<std::string>& sets,
                     std::ostream& out) {
  std::map<std::string, std::string> overrides;
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + kv + "'");
    overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  persona::PersonaStore store(data_dir_of(config));
  const auto edited = persona::edit_persona(store.load(id), overrides);
  store.store(id, edited);
  out << persona::to_document(edited);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Talk with everyday objects: acquaintance, persona and push-to-talk bonding."};
  app.require_subcommand(1);
  app.fallthrough();

  ConfigFlags flags;
  std::string config_file, backends, endpoint, data_dir, language;
  app.add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--backends", backends, "Use mock or http backends for every capability");
  app.add_option("--backend-endpoint", endpoint, "host:port of the HTTP inference service");
  app.add_option("--data-dir", data_dir, "Workspace directory (default objvoice-data)");
  app.add_option("--language", language, "Persona language: en or zh");

  std::optional<std::uint64_t> seed;
  std::optional<std::string> sprites_opt;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Scene noise seed (default: the scene's own)");
    sub->add_option("--sprites", sprites_opt, "Directory of <id>.rgb sprite tiles");
  };

  std::string source, label;
  auto* acquaint = app.add_subcommand("acquaint", "Get acquainted with a new object");
  acquaint->add_option("--source", source, "Scope address host:port or a scene .json")->required();
  acquaint->add_option("--label", label, "Object label (default objectN)");
  add_seed(acquaint);

  std::uint32_t profile = 0;
  std::optional<std::string> audio_dir;
  auto* talk = app.add_subcommand("talk", "Push-to-talk with a registered object from the terminal");
  talk->add_option("--profile", profile, "Class id of the object")->required();
  talk->add_option("--audio-dir", audio_dir, "Write reply clips here");

  std::string scene, wand_path, out_dir = "sim-out";
  auto* simulate = app.add_subcommand("simulate", "Run a scripted session on a virtual clock");
  simulate->add_option("--scene", scene, "Scene script")->required()->check(CLI::ExistingFile);
  simulate->add_option("--wand", wand_path, "Wand script")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory (default sim-out)");
  add_seed(simulate);

  std::uint32_t truth = 0;
  std::size_t frames = vision::kEvaluationFrames;
  std::optional<std::string> report_file;
  auto* eval = app.add_subcommand("eval", "Continuous-detection report on a scripted scene");
  eval->add_option("--scene", scene, "Scene script")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", truth, "Class id expected in every frame")->required();
  eval->add_option("--frames", frames, "Frames to evaluate (default 200)");
  eval->add_option("--out", report_file, "Also write the report here");
  add_seed(eval);

  std::string bind;
  std::optional<std::string> serve_source, wand_bind;
  auto* serve = app.add_subcommand("serve", "Serve the session API");
  serve->add_option("--bind", bind, "host:port for the session API")->required();
  serve->add_option("--source", serve_source, "Scope address or scene .json");
  serve->add_option("--wand-bind", wand_bind, "host:port to accept a wand connection on");
  add_seed(serve);

  bool loop = false;
  auto* scope = app.add_subcommand("scope", "Emulate a scope device streaming a scene");
  scope->add_option("--scene", scene, "Scene script")->required()->check(CLI::ExistingFile);
  scope->add_option("--bind", bind, "host:port to serve frames on")->required();
  scope->add_flag("--loop", loop, "Replay the scene forever");
  add_seed(scope);

  std::string connect;
  auto* wand_cmd = app.add_subcommand("wand", "Emulate a wand replaying a script");
  wand_cmd->add_option("--script", wand_path, "Wand script")->required()->check(CLI::ExistingFile);
  wand_cmd->add_option("--connect", connect, "Engine wand listener host:port")->required();

  std::uint32_t persona_id = 0;
  std::vector<std::string> sets;
  auto* persona_cmd = app.add_subcommand("persona", "Manage personas");
  persona_cmd->require_subcommand(1);
  auto* edit = persona_cmd->add_subcommand("edit", "Edit persona fields");
  edit->add_option("id", persona_id, "Class id")->required();
  edit->add_option("--set", sets, "key=value (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  const std::optional<fs::path> sprites =
      sprites_opt ? std::optional<fs::path>(*sprites_opt) : std::nullopt;
  AppConfig config;
  try {
    if (!config_file.empty()) flags.config_file = config_file;
    if (!backends.empty()) flags.backends = backends;
    if (!endpoint.empty()) flags.backend_endpoint = endpoint;
    if (!data_dir.empty()) flags.data_dir = data_dir;
    if (!language.empty()) flags.language = language;
    config = resolve_config(flags);
  } catch (const Error& e) {
    err << "usage error: " << e.detail() << "\n";
    return kExitUsage;
  }

  try {
    if (*acquaint) return cmd_acquaint(config, source, label, seed, sprites, out);
    if (*talk) {
      return cmd_talk(config, profile,
                      audio_dir ? std::optional<fs::path>(*audio_dir) : std::nullopt, in, out, err);
    }
    if (*simulate) return cmd_simulate(config, scene, wand_path, out_dir, seed, sprites, out);
    if (*eval) {
      return cmd_eval(config, scene, truth, frames, seed, sprites,
                      report_file ? std::optional<fs::path>(*report_file) : std::nullopt, out);
    }
    if (*serve) return cmd_serve(config, bind, serve_source, wand_bind, seed, sprites, out, err);
    if (*scope) return cmd_scope(scene, bind, seed, sprites, loop, out);
    if (*wand_cmd) return cmd_wand(wand_path, connect, out);
    if (*edit) return cmd_persona_edit(config, persona_id, sets, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace objvoice::app
