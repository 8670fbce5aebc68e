#include "overlayx/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "overlayx/error.hpp"

extern char** environ;

namespace overlayx::proc {

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

}  // namespace

Result run(const std::vector<std::string>& argv, std::string_view stdin_data) {
  if (argv.empty()) throw AdapterUnavailable("empty command");

  // stdin is a socket so that writes to an exited child fail with EPIPE
  // (MSG_NOSIGNAL) instead of raising SIGPIPE in this process.
  int in_pair[2];
  int out_pipe[2];
  int err_pipe[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0 ||
      ::pipe2(out_pipe, O_CLOEXEC) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0) {
    throw AdapterUnavailable(std::string("cannot create pipes: ") + std::strerror(errno));
  }
  Fd in_parent(in_pair[0]), in_child(in_pair[1]);
  Fd out_read(out_pipe[0]), out_write(out_pipe[1]);
  Fd err_read(err_pipe[0]), err_write(err_pipe[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_child.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_write.get(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_write.get(), STDERR_FILENO);

  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw AdapterUnavailable("cannot start '" + argv[0] + "': " + std::strerror(rc));
  }
  in_child.reset();
  out_write.reset();
  err_write.reset();

  Result result;
  std::size_t written = 0;
  if (stdin_data.empty()) in_parent.reset();

  std::array<char, 65536> buf{};
  bool out_open = true;
  bool err_open = true;
  while (out_open || err_open) {
    std::array<pollfd, 3> fds{};
    nfds_t n = 0;
    if (out_open) fds[n++] = {out_read.get(), POLLIN, 0};
    if (err_open) fds[n++] = {err_read.get(), POLLIN, 0};
    if (in_parent.get() >= 0) fds[n++] = {in_parent.get(), POLLOUT, 0};
    if (::poll(fds.data(), n, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (nfds_t i = 0; i < n; ++i) {
      if (fds[i].revents == 0) continue;
      if (fds[i].fd == in_parent.get()) {
        const ssize_t k = ::send(in_parent.get(), stdin_data.data() + written,
                                 stdin_data.size() - written, MSG_NOSIGNAL | MSG_DONTWAIT);
        if (k > 0) written += static_cast<std::size_t>(k);
        if (k < 0 && errno != EAGAIN && errno != EINTR) written = stdin_data.size();
        if (written >= stdin_data.size()) {
          ::shutdown(in_parent.get(), SHUT_WR);
          in_parent.reset();
        }
        continue;
      }
      const ssize_t k = ::read(fds[i].fd, buf.data(), buf.size());
      const bool is_out = fds[i].fd == out_read.get();
      if (k > 0) {
        (is_out ? result.out : result.err).append(buf.data(), static_cast<std::size_t>(k));
      } else if (k == 0 || (errno != EINTR && errno != EAGAIN)) {
        (is_out ? out_open : err_open) = false;
      }
    }
  }
  in_parent.reset();

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  // posix_spawnp reports a missing program through the child on some libcs.
  if (result.exit_code == 127 && result.out.empty() && result.err.empty()) {
    throw AdapterUnavailable("cannot start '" + argv[0] + "'");
  }
  return result;
}

std::string tail(std::string_view s, std::size_t max_bytes) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.remove_suffix(1);
  if (s.size() <= max_bytes) return std::string(s);
  return "..." + std::string(s.substr(s.size() - max_bytes));
}

std::vector<std::string> split_command(std::string_view command) {
  std::istringstream in{std::string(command)};
  std::vector<std::string> parts;
  std::string p;
  while (in >> p) parts.push_back(p);
  return parts;
}

TempDir::TempDir(std::string_view prefix) {
  std::string tmpl = (std::filesystem::temp_directory_path() / (std::string(prefix) + "-XXXXXX")).string();
  if (::mkdtemp(tmpl.data()) == nullptr) {
    throw Error(std::string("cannot create temporary directory: ") + std::strerror(errno));
  }
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace overlayx::proc
