#include "redex/errors.hpp"

namespace redex {

ParseError::ParseError(int line, const std::string& what)
    : Error("ParseError", line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

}  // namespace redex
