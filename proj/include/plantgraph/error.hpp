#pragma once

#include <stdexcept>
#include <string>

namespace plantgraph {

enum class ErrorCode {
  // XML ingestion
  XmlSyntax,
  MissingId,
  DuplicateId,
  // PCF ingestion
  PcfSyntax,
  EndpointCount,
  DegenerateComponent,
  UnitMismatch,
  // graph documents
  MalformedDocument,
  DanglingEdge,
  VersionMismatch,
  // merging
  IdentityConflict,
  // orientation
  NoStartCoords,
  ElevationTie,
  UnknownNode,
  AmbiguousRoot,
  CycleDetected,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::XmlSyntax: return "XmlSyntax";
    case ErrorCode::MissingId: return "MissingId";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::PcfSyntax: return "PcfSyntax";
    case ErrorCode::EndpointCount: return "EndpointCount";
    case ErrorCode::DegenerateComponent: return "DegenerateComponent";
    case ErrorCode::UnitMismatch: return "UnitMismatch";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::IdentityConflict: return "IdentityConflict";
    case ErrorCode::NoStartCoords: return "NoStartCoords";
    case ErrorCode::ElevationTie: return "ElevationTie";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::AmbiguousRoot: return "AmbiguousRoot";
    case ErrorCode::CycleDetected: return "CycleDetected";
  }
  return "Unknown";
}

/// Domain error carrying a machine-checkable code. Message already
/// includes the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace plantgraph
