#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcm {

enum class Errc {
  LoopRejected,
  UnknownVertex,
  UnknownEdge,
  NonzeroDegree,
  SetTooSmall,
  EmptyBucket,
  EmptyGraph,
  IsolatedVertex,
  EmptyGraphForPj,
  OddDegreeSum,
  InvalidDegreeSequence,
  ResampleLimitExceeded,
  MalformedLog,
  InconsistentLog,
  TooLarge,
  TraceTooShort,
  ParseError,
};

constexpr std::string_view to_string(Errc c) {
  switch (c) {
    case Errc::LoopRejected: return "LoopRejected";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::UnknownEdge: return "UnknownEdge";
    case Errc::NonzeroDegree: return "NonzeroDegree";
    case Errc::SetTooSmall: return "SetTooSmall";
    case Errc::EmptyBucket: return "EmptyBucket";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::IsolatedVertex: return "IsolatedVertex";
    case Errc::EmptyGraphForPj: return "EmptyGraphForPj";
    case Errc::OddDegreeSum: return "OddDegreeSum";
    case Errc::InvalidDegreeSequence: return "InvalidDegreeSequence";
    case Errc::ResampleLimitExceeded: return "ResampleLimitExceeded";
    case Errc::MalformedLog: return "MalformedLog";
    case Errc::InconsistentLog: return "InconsistentLog";
    case Errc::TooLarge: return "TooLarge";
    case Errc::TraceTooShort: return "TraceTooShort";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rcm
