#include "objvoice/error.hpp"

namespace objvoice {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadChecksum: return "BadChecksum";
    case Errc::Truncated: return "Truncated";
    case Errc::UnknownKind: return "UnknownKind";
    case Errc::Unreachable: return "Unreachable";
    case Errc::Timeout: return "Timeout";
    case Errc::MalformedFrame: return "MalformedFrame";
    case Errc::SourceLost: return "SourceLost";
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::IoFailure: return "IoFailure";
    case Errc::TrainerFailure: return "TrainerFailure";
    case Errc::ClassListMismatch: return "ClassListMismatch";
    case Errc::BackendFailure: return "BackendFailure";
    case Errc::InvalidGeneration: return "InvalidGeneration";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingField: return "MissingField";
    case Errc::InvalidVoice: return "InvalidVoice";
    case Errc::InvalidLanguage: return "InvalidLanguage";
    case Errc::NotFound: return "NotFound";
    case Errc::UnknownField: return "UnknownField";
    case Errc::SynthFailure: return "SynthFailure";
    case Errc::EmptyTranscript: return "EmptyTranscript";
    case Errc::TransportError: return "TransportError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::RemoteError: return "RemoteError";
    case Errc::ScriptInvalid: return "ScriptInvalid";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidState: return "InvalidState";
  }
  return "Unknown";
}

namespace {
std::string compose(Errc code, const std::string& detail) {
  std::string out(to_string(code));
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}
}  // namespace

Error::Error(Errc code, std::string detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(std::move(detail)) {}

RemoteError::RemoteError(int status, std::string body)
    : Error(Errc::RemoteError, "status " + std::to_string(status) + ": " + body),
      status_(status),
      body_(std::move(body)) {}

}  // namespace objvoice
