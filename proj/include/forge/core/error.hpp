#pragma once

#include <stdexcept>
#include <string>

namespace forge {

enum class ErrorKind {
  kInvalidArgument,  // malformed request or arguments
  kNotFound,         // unknown id, template, session or file
  kOutOfBounds,      // parameter outside its schema bounds
  kSchema,           // document structure violation
  kConflict,         // duplicate registration, busy session, empty save
  kNumeric,          // non-finite loss or degenerate geometry during fitting
  kIo,               // filesystem failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace forge
