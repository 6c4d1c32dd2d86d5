#include "subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "pnp/errors.hpp"

namespace pnp::detail {

namespace {

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe() {
    if (pipe(fds) != 0) throw Error("pipe() failed");
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  int read_end() const { return fds[0]; }
  int write_end() const { return fds[1]; }
  void close_read() {
    if (fds[0] >= 0) ::close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) ::close(fds[1]);
    fds[1] = -1;
  }
};

void set_nonblocking(int fd) {
  int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

SubprocessResult run_subprocess(const std::vector<std::string>& argv,
                                const std::vector<std::uint8_t>& input,
                                double timeout_sec) {
  if (argv.empty()) throw Error("empty subprocess command");

  // A child that exits early must not kill us via SIGPIPE; the write loop
  // handles EPIPE instead.
  static const int sigpipe_ignored = [] {
    signal(SIGPIPE, SIG_IGN);
    return 0;
  }();
  (void)sigpipe_ignored;

  Pipe to_child, from_child, err_child;

  pid_t pid = fork();
  if (pid < 0) throw Error("fork() failed");
  if (pid == 0) {
    // Child: wire the pipes to stdio and exec.
    dup2(to_child.read_end(), STDIN_FILENO);
    dup2(from_child.write_end(), STDOUT_FILENO);
    dup2(err_child.write_end(), STDERR_FILENO);
    to_child.close_read();
    to_child.close_write();
    from_child.close_read();
    from_child.close_write();
    err_child.close_read();
    err_child.close_write();
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    // Only reached when exec fails.
    const char* msg = "exec failed\n";
    ssize_t ignored = write(STDERR_FILENO, msg, strlen(msg));
    (void)ignored;
    _exit(127);
  }

  to_child.close_read();
  from_child.close_write();
  err_child.close_write();
  set_nonblocking(to_child.write_end());
  set_nonblocking(from_child.read_end());
  set_nonblocking(err_child.read_end());

  SubprocessResult result;
  std::size_t written = 0;
  bool stdin_open = true, stdout_open = true, stderr_open = true;
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::milliseconds(static_cast<long long>(timeout_sec * 1000.0));

  while (stdout_open || stderr_open || stdin_open) {
    struct pollfd fds[3];
    int nfds = 0;
    int stdin_slot = -1, stdout_slot = -1, stderr_slot = -1;
    if (stdin_open) {
      stdin_slot = nfds;
      fds[nfds++] = {to_child.write_end(), POLLOUT, 0};
    }
    if (stdout_open) {
      stdout_slot = nfds;
      fds[nfds++] = {from_child.read_end(), POLLIN, 0};
    }
    if (stderr_open) {
      stderr_slot = nfds;
      fds[nfds++] = {err_child.read_end(), POLLIN, 0};
    }

    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, nullptr, 0);
      result.timed_out = true;
      return result;
    }
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
    int rc = poll(fds, static_cast<nfds_t>(nfds), std::max(wait_ms, 1));
    if (rc < 0) {
      if (errno == EINTR) continue;
      kill(pid, SIGKILL);
      waitpid(pid, nullptr, 0);
      throw Error("poll() failed while talking to subprocess");
    }
    if (rc == 0) continue;  // deadline handled at loop top

    if (stdin_slot >= 0 && (fds[stdin_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (written < input.size() && (fds[stdin_slot].revents & POLLOUT)) {
        ssize_t n = write(to_child.write_end(), input.data() + written,
                          std::min<std::size_t>(input.size() - written, 1 << 16));
        if (n > 0) written += static_cast<std::size_t>(n);
        else if (n < 0 && errno != EAGAIN && errno != EINTR) {
          // Child closed its stdin (EPIPE with SIGPIPE ignored via MSG?); stop writing.
          stdin_open = false;
          to_child.close_write();
        }
      }
      if (written >= input.size() || (fds[stdin_slot].revents & (POLLERR | POLLHUP))) {
        stdin_open = false;
        to_child.close_write();
      }
    }
    auto drain = [&](int slot, int fd, auto&& sink, bool& open_flag, Pipe& p) {
      if (slot < 0 || !(fds[slot].revents & (POLLIN | POLLHUP | POLLERR))) return;
      char buf[1 << 16];
      for (;;) {
        ssize_t n = read(fd, buf, sizeof(buf));
        if (n > 0) {
          sink(buf, static_cast<std::size_t>(n));
        } else if (n == 0) {
          open_flag = false;
          p.close_read();
          break;
        } else {
          if (errno == EAGAIN || errno == EWOULDBLOCK) break;
          if (errno == EINTR) continue;
          open_flag = false;
          p.close_read();
          break;
        }
      }
    };
    drain(stdout_slot, from_child.read_end(),
          [&](const char* b, std::size_t n) {
            result.stdout_bytes.insert(result.stdout_bytes.end(),
                                       reinterpret_cast<const std::uint8_t*>(b),
                                       reinterpret_cast<const std::uint8_t*>(b) + n);
          },
          stdout_open, from_child);
    drain(stderr_slot, err_child.read_end(),
          [&](const char* b, std::size_t n) { result.stderr_text.append(b, n); },
          stderr_open, err_child);
  }

  int status = 0;
  // Output streams are closed; wait for exit but keep honoring the deadline.
  for (;;) {
    pid_t w = waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      result.timed_out = true;
      return result;
    }
    usleep(2000);
  }
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  return result;
}

}  // namespace pnp::detail
