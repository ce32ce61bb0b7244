#pragma once

#include <stdexcept>
#include <string>

namespace fixterm {

enum class ErrorKind {
  InvalidSpec,
  InvalidArgument,
  InfeasibleCapital,
  NumericalFailure,
  UndefinedStrategy,
  Parse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when the capital handed to a (sub)problem is below its minimum.
class InfeasibleCapital : public Error {
 public:
  InfeasibleCapital(const std::string& what, double required, double available)
      : Error(ErrorKind::InfeasibleCapital, what), required_(required), available_(available) {}

  double required() const noexcept { return required_; }
  double available() const noexcept { return available_; }

 private:
  double required_;
  double available_;
};

}  // namespace fixterm
