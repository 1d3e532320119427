#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace posegate {

// Typed failure modes used across the library. Everything derives from
// std::runtime_error so callers can catch broadly or by exact type.

class InvalidParameterError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidInputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Rotation angle at (or numerically indistinguishable from) pi: the
// rotation axis is not unique and no canonical log exists.
class AmbiguousAxisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class BehindCameraError : public std::runtime_error {
  public:
    BehindCameraError(std::size_t point_index, double depth_mm)
        : std::runtime_error("point " + std::to_string(point_index) +
                             " is behind the camera (z = " + std::to_string(depth_mm) + " mm)"),
          point_index_(point_index),
          depth_mm_(depth_mm) {}

    std::size_t point_index() const { return point_index_; }
    double depth_mm() const { return depth_mm_; }

  private:
    std::size_t point_index_;
    double depth_mm_;
};

class InsufficientPointsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InsufficientTraceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DegenerateConfigurationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ScenarioInfeasibleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class EmptyInputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace posegate
