#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bergelab {

/** @brief Base error; the message names module, operation and offending input. */
class Error : public std::runtime_error {
 public:
  Error(std::string kind, std::string module, std::string op, std::string detail)
      : std::runtime_error(module + "/" + op + ": " + kind + ": " + detail),
        kind_(std::move(kind)),
        module_(std::move(module)),
        op_(std::move(op)),
        detail_(std::move(detail)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& op() const noexcept { return op_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string kind_;
  std::string module_;
  std::string op_;
  std::string detail_;
};

#define BERGELAB_DEFINE_ERROR(Name)                                             \
  class Name : public Error {                                                   \
   public:                                                                      \
    Name(std::string module, std::string op, std::string detail)                \
        : Error(#Name, std::move(module), std::move(op), std::move(detail)) {}  \
  };

BERGELAB_DEFINE_ERROR(IndeterminateForm)
BERGELAB_DEFINE_ERROR(DivisionByZero)
BERGELAB_DEFINE_ERROR(UnboundVariable)
BERGELAB_DEFINE_ERROR(ExactModeUnsupported)
BERGELAB_DEFINE_ERROR(ValidationError)
BERGELAB_DEFINE_ERROR(EmptyNotAllowed)
BERGELAB_DEFINE_ERROR(NoGuardMatched)
BERGELAB_DEFINE_ERROR(PreconditionFailed)
BERGELAB_DEFINE_ERROR(EmptyDomainNeighborhood)
BERGELAB_DEFINE_ERROR(UnknownFixture)
BERGELAB_DEFINE_ERROR(InfeasibleOrder)
BERGELAB_DEFINE_ERROR(StateOutOfRange)
BERGELAB_DEFINE_ERROR(GridCoverageError)
BERGELAB_DEFINE_ERROR(InterpolationRangeError)
BERGELAB_DEFINE_ERROR(InfeasibleAction)
BERGELAB_DEFINE_ERROR(ConfigError)
BERGELAB_DEFINE_ERROR(IoError)

#undef BERGELAB_DEFINE_ERROR

}  // namespace bergelab
