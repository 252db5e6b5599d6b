#pragma once

#include <stdexcept>
#include <string>

namespace opnorm {

// Base class for every error raised by the library. `kind()` is a stable
// lower-case token used by the CLI in its one-line error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define OPNORM_DEFINE_ERROR(Name, token)                            \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(token, what) {}  \
  };

OPNORM_DEFINE_ERROR(ParameterError, "parameter")
OPNORM_DEFINE_ERROR(ScaleError, "scale")
OPNORM_DEFINE_ERROR(DataError, "data")
OPNORM_DEFINE_ERROR(KindError, "kind")
OPNORM_DEFINE_ERROR(ShapeError, "shape")
OPNORM_DEFINE_ERROR(NormalizationError, "normalization")
OPNORM_DEFINE_ERROR(NotSubGaussianError, "not_subgaussian")
OPNORM_DEFINE_ERROR(InsufficientTailError, "insufficient_tail")
OPNORM_DEFINE_ERROR(DegenerateEnsembleError, "degenerate_ensemble")
OPNORM_DEFINE_ERROR(IoError, "io")
OPNORM_DEFINE_ERROR(ConfigError, "config")

#undef OPNORM_DEFINE_ERROR

// Power iteration ran out of iterations. Carries the last estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : Error("convergence", what), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

}  // namespace opnorm
