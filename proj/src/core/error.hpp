#pragma once

#include <stdexcept>
#include <string>

namespace rainsd {

enum class ErrorKind {
  invalid_argument,
  io,
  format,
  internal,
};

/// Library-wide exception. The C API maps ErrorKind onto status codes, so
/// every throw site should pick the kind that best describes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  static Error invalid(std::string msg) { return {ErrorKind::invalid_argument, std::move(msg)}; }
  static Error io(std::string msg) { return {ErrorKind::io, std::move(msg)}; }
  static Error format(std::string msg) { return {ErrorKind::format, std::move(msg)}; }
  static Error internal(std::string msg) { return {ErrorKind::internal, std::move(msg)}; }

 private:
  ErrorKind kind_;
};

}  // namespace rainsd
