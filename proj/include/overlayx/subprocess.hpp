#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace overlayx::proc {

struct Result {
  int exit_code = 0;  // 128 + signal number when killed by a signal
  std::string out;
  std::string err;
};

// Runs argv[0] (searched in PATH) with the given stdin, collecting stdout and
// stderr. Throws AdapterUnavailable when the program cannot be started.
Result run(const std::vector<std::string>& argv, std::string_view stdin_data = {});

// Last `max_bytes` of s without trailing newlines, prefixed with "..." when
// cut, for error messages.
std::string tail(std::string_view s, std::size_t max_bytes = 400);

// Splits a command string on whitespace ("python3 tool.py" -> 2 args).
std::vector<std::string> split_command(std::string_view command);

// mkdtemp-backed directory removed (recursively) on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view prefix = "overlayx");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace overlayx::proc
