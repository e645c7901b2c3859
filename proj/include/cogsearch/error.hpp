#pragma once

#include <stdexcept>
#include <string>

namespace cogsearch {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something malformed (empty query, bad weights, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace cogsearch
