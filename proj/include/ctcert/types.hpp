#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace ctcert {

// Manifolds here have dimension <= 3, so phase-space objects fit in 6 rows.
// Bounded max sizes keep the inner integration loops off the heap.
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;
using WideMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 12>;

enum class ErrorKind {
  kInvalidArgument,
  kDomain,
  kEscape,
  kNoConvergence,
  kPrecondition,
  kSingular,
  kOracleUnreliable,
  kNonDiffeomorphism,
  kConfig,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<double> time = std::nullopt)
      : std::runtime_error(what), kind_(kind), time_(time) {}

  ErrorKind kind() const { return kind_; }
  // Integration time at which the failure happened, when meaningful.
  std::optional<double> time() const { return time_; }

 private:
  ErrorKind kind_;
  std::optional<double> time_;
};

}  // namespace ctcert
