#include "surgscan/inference/process_backend.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <optional>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "surgscan/codec.hpp"

extern char** environ;

namespace surgscan::inference {

namespace fs = std::filesystem;

namespace {

class TempPng {
 public:
  explicit TempPng(const imaging::Raster& img) {
    std::string pattern = (fs::temp_directory_path() / "surgscan-XXXXXX.png").string();
    const int fd = ::mkstemps(pattern.data(), 4);
    if (fd < 0) throw Error(Errc::IoFailure, "cannot create temporary image");
    ::close(fd);
    path_ = pattern;
    imaging::save_png(img, path_);
  }
  ~TempPng() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  TempPng(const TempPng&) = delete;
  TempPng& operator=(const TempPng&) = delete;

  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
};

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const noexcept { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

}  // namespace

ProcessBackend::ProcessBackend(std::string_view command, std::chrono::milliseconds timeout,
                               bool concurrency_safe)
    : timeout_(timeout), concurrency_safe_(concurrency_safe) {
  std::istringstream in{std::string(command)};
  std::string tok;
  while (in >> tok) argv_.push_back(tok);
  if (argv_.empty()) throw Error(Errc::InvalidConfig, "empty backend command");
}

std::vector<ClassifierVerdict> parse_verdict_lines(std::string_view output) {
  std::vector<ClassifierVerdict> verdicts;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < output.size()) {
    std::size_t eol = output.find('\n', pos);
    if (eol == std::string_view::npos) eol = output.size();
    std::string_view line = output.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw Error(Errc::BackendFailure, "backend output line " + std::to_string(line_no) +
                                            " is not 'label<TAB>confidence'");
    }
    const std::string conf(line.substr(tab + 1));
    char* end = nullptr;
    const double c = std::strtod(conf.c_str(), &end);
    if (conf.empty() || end != conf.c_str() + conf.size() || !std::isfinite(c)) {
      throw Error(Errc::BackendFailure, "backend output line " + std::to_string(line_no) +
                                            " has a bad confidence");
    }
    verdicts.push_back({std::string(line.substr(0, tab)), c});
  }
  return verdicts;
}

std::vector<ClassifierVerdict> ProcessBackend::run(const InspectionInput& input) {
  std::optional<TempPng> temp;
  fs::path image = input.source;
  if (image.empty() || !fs::exists(image)) {
    temp.emplace(input.raster);
    image = temp->path();
  }

  int pipe_fds[2];
  if (::pipe2(pipe_fds, O_CLOEXEC) != 0) throw Error(Errc::BackendFailure, "pipe failed");
  Fd read_end(pipe_fds[0]);
  Fd write_end(pipe_fds[1]);

  std::vector<std::string> args = argv_;
  args.push_back(image.string());
  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());
  cargs.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, write_end.get(), STDOUT_FILENO);
  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, cargs[0], &actions, nullptr, cargs.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  write_end.reset();
  if (rc != 0) {
    throw Error(Errc::BackendFailure, "cannot start '" + argv_[0] + "': " + std::strerror(rc));
  }

  std::string output;
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  bool timed_out = false;
  char buf[4096];
  while (true) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{read_end.get(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) {
      timed_out = true;
      break;
    }
    const ssize_t n = ::read(read_end.get(), buf, sizeof(buf));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  if (timed_out) ::kill(pid, SIGKILL);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) {
    throw Error(Errc::BackendFailure, "backend '" + argv_[0] + "' timed out after " +
                                          std::to_string(timeout_.count()) + " ms");
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(Errc::BackendFailure, "backend '" + argv_[0] + "' exited with status " +
                                          std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
  }
  return parse_verdict_lines(output);
}

}  // namespace surgscan::inference
