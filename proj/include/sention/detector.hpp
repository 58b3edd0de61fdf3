#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <string>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include "sention/core.hpp"
#include "sention/manifest.hpp"

namespace sention {

namespace detail {

inline std::string substitute_placeholder(std::string s, const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = s.find(key, pos)) != std::string::npos) {
    s.replace(pos, key.size(), value);
    pos += value.size();
  }
  return s;
}

inline std::filesystem::path unique_temp_path(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1));
  return std::filesystem::temp_directory_path() / ("sention-" + tag + "-" + stamp + ".csv");
}

struct SubprocessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string stderr_excerpt;
};

// Runs `sh -c command`, capturing stderr, killing the child after timeout.
inline SubprocessResult run_shell(const std::string& command, double timeout_sec) {
  int err_pipe[2];
  if (::pipe(err_pipe) != 0) throw IoError("pipe() failed");

  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(err_pipe[0]);
    ::close(err_pipe[1]);
    throw IoError("fork() failed");
  }
  if (pid == 0) {
    ::setsid();  // own process group, so a timeout kill reaps grandchildren too
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::close(err_pipe[0]);
    ::close(err_pipe[1]);
    const int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) {
      ::dup2(devnull, STDOUT_FILENO);
      ::close(devnull);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  ::close(err_pipe[1]);
  ::fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  SubprocessResult res;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_sec);
  int status = 0;
  bool done = false;
  char buf[512];
  while (!done) {
    ssize_t n;
    while ((n = ::read(err_pipe[0], buf, sizeof buf)) > 0) {
      if (res.stderr_excerpt.size() < 512)
        res.stderr_excerpt.append(buf, buf + std::min<std::size_t>(n, 512 - res.stderr_excerpt.size()));
    }
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      done = true;
    } else if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);  // whole group
      ::waitpid(pid, &status, 0);
      res.timed_out = true;
      done = true;
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  ssize_t n;
  while ((n = ::read(err_pipe[0], buf, sizeof buf)) > 0) {
    if (res.stderr_excerpt.size() < 512)
      res.stderr_excerpt.append(buf, buf + std::min<std::size_t>(n, 512 - res.stderr_excerpt.size()));
  }
  ::close(err_pipe[0]);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

}  // namespace detail

/// Adapter for an external 68-point landmark detector. `detector_command` is
/// a shell command template containing `{input}` and `{output}` placeholders;
/// the program must write the 68-line `x,y` CSV to `{output}` and exit 0.
inline LandmarkSet detect_landmarks_external(const std::filesystem::path& image_path,
                                             const std::string& detector_command,
                                             double timeout_sec = 10.0) {
  if (detector_command.find("{input}") == std::string::npos ||
      detector_command.find("{output}") == std::string::npos)
    throw Error("detector command must contain {input} and {output} placeholders");

  const std::filesystem::path out_path = detail::unique_temp_path("landmarks");
  struct Cleanup {
    std::filesystem::path p;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  } cleanup{out_path};

  std::string cmd = detail::substitute_placeholder(detector_command, "{input}", image_path.string());
  cmd = detail::substitute_placeholder(cmd, "{output}", out_path.string());

  const auto res = detail::run_shell(cmd, timeout_sec);
  if (res.timed_out) throw DetectorFailed(-1, "timed out after " + std::to_string(timeout_sec) + "s");
  if (res.exit_code != 0) throw DetectorFailed(res.exit_code, res.stderr_excerpt);
  return load_landmarks(out_path);
}

}  // namespace sention
