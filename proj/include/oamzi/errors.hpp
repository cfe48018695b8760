#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oamzi {

enum class ErrorKind {
  LeakageExceeded,
  ZeroNorm,
  CutoffCapExceeded,
  InvalidTransmittance,
  InvalidArgument,
  DerivativeVanished,
  NoPeak,
  TargetUnreachable,
  ZeroInformation,
  DegenerateState,
  GridTooCoarse,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::LeakageExceeded: return "LeakageExceeded";
    case ErrorKind::ZeroNorm: return "ZeroNorm";
    case ErrorKind::CutoffCapExceeded: return "CutoffCapExceeded";
    case ErrorKind::InvalidTransmittance: return "InvalidTransmittance";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DerivativeVanished: return "DerivativeVanished";
    case ErrorKind::NoPeak: return "NoPeak";
    case ErrorKind::TargetUnreachable: return "TargetUnreachable";
    case ErrorKind::ZeroInformation: return "ZeroInformation";
    case ErrorKind::DegenerateState: return "DegenerateState";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library failure with a machine-readable kind; the message is prefixed
/// with the kind's name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace oamzi
