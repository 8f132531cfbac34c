#pragma once

#include <stdexcept>
#include <string>

namespace tbrkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text (Newick, UNET, ...). pos is a 0-based byte offset into
// the offending text, or npos when it does not apply.
struct ParseError : Error {
  std::size_t pos;
  explicit ParseError(const std::string& msg, std::size_t p = std::string::npos)
      : Error(msg), pos(p) {}
};

struct InvalidArgument : Error {
  using Error::Error;
};

// A bounded search ran out of its work budget before finishing. Never used to
// report a wrong answer; callers either retry with a bigger budget or accept
// the bracketed result the thrower documented.
struct BudgetExceeded : Error {
  using Error::Error;
};

}  // namespace tbrkit
