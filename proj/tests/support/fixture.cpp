// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pgakv Authors

#include "fixture.hpp"

#include <sys/wait.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fixture {

std::string path(const std::string& name) { return std::string(PGAKV_FIXTURES) + "/" + name; }

std::string read_file(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p);
  out << content;
}

std::string temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("pgakv-" + tag + "-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

pgakv::Graph toy_kg() {
  std::ifstream in(path("toy_kg.tsv"), std::ios::binary);
  return pgakv::parse_triple_file(in);
}

pgakv::TripleIndex toy_index() {
  std::ifstream in(path("toy_kg.index"), std::ios::binary);
  pgakv::HashingEmbedder e;
  return pgakv::TripleIndex::load(in, e.fingerprint());
}

std::vector<pgakv::QaItem> toy_questions() {
  std::ifstream in(path("toy_questions.jsonl"), std::ios::binary);
  return pgakv::load_dataset(in, pgakv::DatasetFormat::kSimpleQuestions);
}

pgakv::Cassette cassette(const std::string& name) {
  return pgakv::Cassette::load_file(path(name));
}

CliResult run_cli(const std::string& args, const std::string& env) {
  std::string dir = temp_dir("cli");
  std::string out = dir + "/stdout", err = dir + "/stderr";
  std::string cmd = "cd '" + std::string(PGAKV_FIXTURES) +
                    "' && for v in $(env | grep -o '^PGAKV_[A-Z_]*'); do unset $v; done; " + env + " '" +
                    std::string(PGAKV_CLI) + "' " + args + " > '" + out + "' 2> '" + err + "'";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  std::filesystem::remove_all(dir);
  return r;
}

}  // namespace fixture
