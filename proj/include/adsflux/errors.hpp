#pragma once

#include <stdexcept>
#include <string>

namespace adsflux {

enum class ErrorKind {
  not_unit_timelike,
  past_directed,
  non_differentiable,
  step_bound,
  endpoint_mismatch,
  not_common_fiber,
  homotopy_too_coarse,
  degenerate_surface,
  unsupported_class,
  non_lagrangian,
  winding,
  quadrature,
  ode_step,
  singular_solve,
  mesh_format,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::not_unit_timelike: return "not-unit-timelike";
    case ErrorKind::past_directed: return "past-directed";
    case ErrorKind::non_differentiable: return "non-differentiable";
    case ErrorKind::step_bound: return "step-bound";
    case ErrorKind::endpoint_mismatch: return "endpoint-mismatch";
    case ErrorKind::not_common_fiber: return "not-common-fiber";
    case ErrorKind::homotopy_too_coarse: return "homotopy-too-coarse";
    case ErrorKind::degenerate_surface: return "degenerate-surface";
    case ErrorKind::unsupported_class: return "unsupported-class";
    case ErrorKind::non_lagrangian: return "non-lagrangian";
    case ErrorKind::winding: return "winding";
    case ErrorKind::quadrature: return "quadrature";
    case ErrorKind::ode_step: return "ode-step";
    case ErrorKind::singular_solve: return "singular-solve";
    case ErrorKind::mesh_format: return "mesh-format";
  }
  return "unknown";
}

class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace adsflux
