#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace objvoice {

// Every failure the engine reports is an Error carrying one of these codes.
enum class Errc {
  // protocol
  BadMagic,
  BadChecksum,
  Truncated,
  UnknownKind,
  Unreachable,
  Timeout,
  MalformedFrame,
  // vision
  SourceLost,
  EmptyMask,
  TooFewSamples,
  IoFailure,
  TrainerFailure,
  ClassListMismatch,
  BackendFailure,
  // persona
  InvalidGeneration,
  ParseError,
  MissingField,
  InvalidVoice,
  InvalidLanguage,
  NotFound,
  UnknownField,
  // dialogue
  SynthFailure,
  EmptyTranscript,
  // backends
  TransportError,
  SchemaError,
  RemoteError,
  // devsim / orchestrator
  ScriptInvalid,
  InvalidArgument,
  InvalidState,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

// Non-2xx reply from a remote inference service.
class RemoteError : public Error {
 public:
  RemoteError(int status, std::string body);

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

}  // namespace objvoice
