#pragma once

#include <stdexcept>
#include <string>

namespace odoq {

// Base class for every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input shorter than its declared sections.
class Truncated : public Error {
 public:
  using Error::Error;
};

// Structurally invalid input (overruns, trailing garbage, bad field values).
class Malformed : public Error {
 public:
  using Error::Error;
};

}  // namespace odoq
