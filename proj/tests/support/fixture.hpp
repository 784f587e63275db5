// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#pragma once

#include <string>
#include <vector>

#include "pgakv/eval.hpp"
#include "pgakv/index.hpp"
#include "pgakv/llm.hpp"

namespace fixture {

std::string path(const std::string& name);  // under tests/fixtures
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Fresh directory under the system temp dir, unique per call.
std::string temp_dir(const std::string& tag);

pgakv::Graph toy_kg();
pgakv::TripleIndex toy_index();
std::vector<pgakv::QaItem> toy_questions();
pgakv::Cassette cassette(const std::string& name);

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the pgakv binary from the fixtures directory with PGAKV_* variables
// cleared. `args` are passed through a shell, so quote as needed.
// Runs the CLI from the fixtures directory with PGAKV_* cleared; `env` is
// prepended to the command, e.g. "PGAKV_TOPK=4".
CliResult run_cli(const std::string& args, const std::string& env = "");

}  // namespace fixture
