#pragma once

#include <stdexcept>
#include <string>

namespace epidss {

// Root of every error raised by the engines. The service layer maps each
// concrete subclass onto exactly one API error code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace epidss
