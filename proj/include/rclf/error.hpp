#pragma once

#include <stdexcept>
#include <string>

namespace rclf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// State outside the model's domain (e.g. S not in (0, S_i)).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Numerical construction has no admissible solution.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rclf
