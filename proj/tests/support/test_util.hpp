#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "core/error.hpp"

namespace test_util {

/// Error code raised by `fn`, or Errc::ok when it returns normally.
inline xrpipe::Errc errc_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const xrpipe::Error& e) {
    return e.code();
  }
  return xrpipe::Errc::ok;
}

/// Unique scratch directory, removed on destruction (best effort).
class TempDir {
 public:
  TempDir() {
    char tmpl[] = "/tmp/xrpipe_test_XXXXXX";
    path_ = ::mkdtemp(tmpl);
  }
  ~TempDir() {
    if (!path_.empty()) std::system(("rm -rf " + path_).c_str());
  }
  std::string file(const std::string& name) const { return path_ + "/" + name; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

/// Runs a shell command, capturing combined output and the exit code.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult result;
  FILE* pipe = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  while (std::size_t n = ::fread(buf, 1, sizeof(buf), pipe))
    result.output.append(buf, n);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

/// Path to the installed CLI binary, provided by the test environment.
inline std::string cli_path() {
  const char* env = std::getenv("XRPIPE_CLI");
  return env ? env : "xrpipe";
}

/// Directory with the shipped example configs.
inline std::string configs_dir() {
  const char* env = std::getenv("XRPIPE_CONFIGS");
  return env ? env : "configs";
}

inline std::size_t count_occurrences(const std::string& haystack,
                                     const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace test_util
