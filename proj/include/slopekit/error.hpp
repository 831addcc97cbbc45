#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slopekit {

enum class Errc {
  nonfinite_distance,
  disconnected_step,
  empty_target,
  unreachable,
  bad_alpha,
  depth_exceeded,
  undefined_field,
  nonpositive_ell,
  invalid_problem,
  unreachable_point,
  unknown_space,
  bad_params,
  missing_artifacts,
  invalid_input,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::nonfinite_distance: return "NONFINITE_DISTANCE";
    case Errc::disconnected_step: return "DISCONNECTED_STEP";
    case Errc::empty_target: return "EMPTY_TARGET";
    case Errc::unreachable: return "UNREACHABLE";
    case Errc::bad_alpha: return "BAD_ALPHA";
    case Errc::depth_exceeded: return "DEPTH_EXCEEDED";
    case Errc::undefined_field: return "UNDEFINED_FIELD";
    case Errc::nonpositive_ell: return "NONPOSITIVE_ELL";
    case Errc::invalid_problem: return "INVALID_PROBLEM";
    case Errc::unreachable_point: return "UNREACHABLE_POINT";
    case Errc::unknown_space: return "UNKNOWN_SPACE";
    case Errc::bad_params: return "BAD_PARAMS";
    case Errc::missing_artifacts: return "MISSING_ARTIFACTS";
    case Errc::invalid_input: return "INVALID_INPUT";
  }
  return "UNKNOWN";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace slopekit
