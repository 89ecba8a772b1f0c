#include "gramforge/oracle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>

#include "gramforge/util.hpp"

extern char** environ;

namespace gramforge {

bool OracleClient::accepts(const std::string& candidate) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++calls_total_;
    if (auto it = cache_.find(candidate); it != cache_.end()) return it->second;
    if (auto it = hashed_cache_.find(sha256_hex(candidate)); it != hashed_cache_.end()) {
      cache_.emplace(candidate, it->second);
      return it->second;
    }
  }
  bool verdict = query(candidate);
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++calls_external_;
    cache_.emplace(candidate, verdict);
  }
  return verdict;
}

OracleStats OracleClient::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return OracleStats{calls_total_, calls_external_, timeouts_, cache_.size()};
}

void OracleClient::note_timeout() {
  std::lock_guard<std::mutex> lock(mu_);
  ++timeouts_;
}

void OracleClient::load_cache_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return;  // absent cache file is an empty cache
  std::lock_guard<std::mutex> lock(mu_);
  std::string line;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    hashed_cache_[line.substr(0, tab)] = line.substr(tab + 1) == "1";
  }
}

void OracleClient::save_cache_file(const std::string& path) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write oracle cache: " + path);
  std::map<std::string, bool> merged = hashed_cache_;
  for (const auto& [s, v] : cache_) merged[sha256_hex(s)] = v;
  for (const auto& [h, v] : merged) out << h << '\t' << (v ? '1' : '0') << '\n';
}

ProcessOracle::ProcessOracle(std::vector<std::string> argv, int timeout_ms)
    : argv_(std::move(argv)), timeout_ms_(timeout_ms) {
  if (argv_.empty()) throw OracleSpawnError("oracle command is empty");
}

namespace {

void write_all_ignore_epipe(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return;  // acceptor may have exited before reading everything
    }
    off += static_cast<std::size_t>(n);
  }
}

}  // namespace

bool ProcessOracle::query(const std::string& candidate) {
  int in_pipe[2];
  if (::pipe(in_pipe) != 0) throw OracleSpawnError("pipe() failed");

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

  std::vector<char*> argv;
  argv.reserve(argv_.size() + 1);
  for (auto& a : argv_) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  pid_t pid = -1;
  int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    throw OracleSpawnError("cannot run oracle command '" + argv_[0] + "': " + std::strerror(rc));
  }

  signal(SIGPIPE, SIG_IGN);
  write_all_ignore_epipe(in_pipe[1], candidate);
  ::close(in_pipe[1]);

  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
  int status = 0;
  for (;;) {
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw OracleSpawnError("waitpid failed for oracle process");
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      note_timeout();
      return false;
    }
    ::usleep(500);
  }
  return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

}  // namespace gramforge
