// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <httplib.h>

namespace pgakv {

struct HttpTarget {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/'
};

// Splits "http://host:8080/v1/embed" into origin and path. Throws
// ContractError on anything that is not http(s).
HttpTarget parse_http_url(std::string_view url);

std::unique_ptr<httplib::Client> make_http_client(const HttpTarget& target,
                                                  int timeout_seconds = 120);

}  // namespace pgakv
