// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "http.hpp"

#include "pgakv/error.hpp"

namespace pgakv {

HttpTarget parse_http_url(std::string_view url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw ContractError("not an http(s) URL: " + std::string(url));
  }
  std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ContractError("unsupported URL scheme: " + std::string(scheme));
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  HttpTarget t;
  if (path_start == std::string_view::npos) {
    t.origin = std::string(url);
    t.path = "/";
  } else {
    t.origin = std::string(url.substr(0, path_start));
    t.path = std::string(url.substr(path_start));
  }
  if (t.origin.size() == scheme_end + 3) {
    throw ContractError("URL has no host: " + std::string(url));
  }
  return t;
}

std::unique_ptr<httplib::Client> make_http_client(const HttpTarget& target,
                                                  int timeout_seconds) {
  auto client = std::make_unique<httplib::Client>(target.origin);
  client->set_connection_timeout(timeout_seconds, 0);
  client->set_read_timeout(timeout_seconds, 0);
  client->set_write_timeout(timeout_seconds, 0);
  return client;
}

}  // namespace pgakv
