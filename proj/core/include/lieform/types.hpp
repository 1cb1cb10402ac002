#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace lieform {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Failure categories; the CLI maps these onto its exit-code contract.
enum class ErrorKind {
  Input,         // malformed manifests, bad parameters, grid mismatch
  Degenerate,    // geometric precondition failed (umbilic, canal, singular coframe)
  Verification,  // a computed result failed its tolerance
  Numerical,     // integration drift, ill-conditioned solve
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace lieform
