#pragma once

/**
 * @file error.hpp
 * @brief Error codes and the exception type thrown by every dl3 operation.
 */

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dl3 {

enum class Errc {
  ArithmeticOverflow,
  PureDualDivisor,
  Domain,
  NormUndefined,
  LightlikeNorm,
  LightlikeNormalize,
  Causal,
  InversionDomain,
  Parse,
  Eval,
  OutOfRange,
  DegenerateSpeed,
  DegenerateFrame,
  Precondition,
  StepSize,
  BranchInfeasible,
  DegeneratePair,
  Input,
  Io,
  Validation,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ArithmeticOverflow: return "arithmetic_overflow";
    case Errc::PureDualDivisor: return "pure_dual_divisor";
    case Errc::Domain: return "domain";
    case Errc::NormUndefined: return "norm_undefined";
    case Errc::LightlikeNorm: return "lightlike_norm";
    case Errc::LightlikeNormalize: return "lightlike_normalize";
    case Errc::Causal: return "causal_character";
    case Errc::InversionDomain: return "inversion_domain";
    case Errc::Parse: return "parse";
    case Errc::Eval: return "eval";
    case Errc::OutOfRange: return "out_of_range";
    case Errc::DegenerateSpeed: return "degenerate_speed";
    case Errc::DegenerateFrame: return "degenerate_frame";
    case Errc::Precondition: return "precondition";
    case Errc::StepSize: return "step_size";
    case Errc::BranchInfeasible: return "branch_infeasible";
    case Errc::DegeneratePair: return "degenerate_pair";
    case Errc::Input: return "input";
    case Errc::Io: return "io";
    case Errc::Validation: return "validation";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse and evaluation errors carry the byte offset (and span length) of
/// the offending source text.
class SourceError : public Error {
 public:
  SourceError(Errc code, const std::string& what, std::size_t offset, std::size_t length = 0)
      : Error(code, what + " at offset " + std::to_string(offset)), offset_(offset), length_(length) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t length() const noexcept { return length_; }

 private:
  std::size_t offset_;
  std::size_t length_;
};

}  // namespace dl3
