#include "cogsearch/generative.hpp"

#include "httplib.h"

namespace cogsearch {

HttpGenerativeBackend::HttpGenerativeBackend(std::string host, int port, std::string path)
    : host_(std::move(host)), port_(port), path_(std::move(path)) {}

std::string HttpGenerativeBackend::complete(const std::string& prompt,
                                            std::chrono::milliseconds timeout) {
  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  auto res = cli.Post(path_, prompt, "application/json");
  if (!res) throw BackendError("backend unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw BackendError("backend returned HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace cogsearch
