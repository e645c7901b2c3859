#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include "cogsearch/error.hpp"

namespace cogsearch {

// Stand-in for a hosted language model: text prompt in, text completion out.
// Every caller validates the completion and falls back to its deterministic
// path when validation fails.
class GenerativeBackend {
 public:
  virtual ~GenerativeBackend() = default;
  virtual std::string name() const = 0;
  // Throws BackendError on timeout or transport failure.
  virtual std::string complete(const std::string& prompt, std::chrono::milliseconds timeout) = 0;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

// Wraps a function; used for stubs and tests.
class FunctionBackend final : public GenerativeBackend {
 public:
  using Fn = std::function<std::string(const std::string&)>;
  FunctionBackend(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  std::string complete(const std::string& prompt, std::chrono::milliseconds) override {
    return fn_(prompt);
  }

 private:
  std::string name_;
  Fn fn_;
};

// POSTs the prompt as the request body (application/json) to
// http://host:port/path and returns the response body.
class HttpGenerativeBackend final : public GenerativeBackend {
 public:
  HttpGenerativeBackend(std::string host, int port, std::string path);
  std::string name() const override { return "http"; }
  std::string complete(const std::string& prompt, std::chrono::milliseconds timeout) override;

 private:
  std::string host_;
  int port_;
  std::string path_;
};

}  // namespace cogsearch
