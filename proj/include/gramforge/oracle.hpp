#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace gramforge {

struct OracleStats {
  std::uint64_t calls_total = 0;
  std::uint64_t calls_external = 0;
  std::uint64_t timeouts = 0;
  std::size_t cache_size = 0;
};

/// The acceptor command could not be started at all. Unlike a rejection or a
/// timeout this aborts the run: no progress is possible without an oracle.
class OracleSpawnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Membership-query client with an exact-string cache and call metering.
/// accepts() is thread-safe; subclasses implement the uncached query.
class OracleClient {
 public:
  virtual ~OracleClient() = default;

  bool accepts(const std::string& candidate);

  OracleStats stats() const;

  /// Line format: sha256-hex "\t" 0|1. Entries loaded this way answer by
  /// hash only; the exact-string cache is rebuilt as queries come in.
  void load_cache_file(const std::string& path);
  void save_cache_file(const std::string& path) const;

 protected:
  virtual bool query(const std::string& candidate) = 0;

  void note_timeout();

 private:
  mutable std::mutex mu_;
  std::map<std::string, bool> cache_;
  std::map<std::string, bool> hashed_cache_;
  std::uint64_t calls_total_ = 0;
  std::uint64_t calls_external_ = 0;
  std::uint64_t timeouts_ = 0;
};

/// Wraps an external acceptor process: candidate on stdin, exit 0 = accept.
/// A query that exceeds the timeout is killed and treated as a reject.
class ProcessOracle : public OracleClient {
 public:
  ProcessOracle(std::vector<std::string> argv, int timeout_ms = 10000);

 protected:
  bool query(const std::string& candidate) override;

 private:
  std::vector<std::string> argv_;
  int timeout_ms_;
};

/// In-process acceptor for tests and for driving inference against a golden
/// grammar without spawning processes.
class CallbackOracle : public OracleClient {
 public:
  explicit CallbackOracle(std::function<bool(const std::string&)> fn) : fn_(std::move(fn)) {}

 protected:
  bool query(const std::string& candidate) override { return fn_(candidate); }

 private:
  std::function<bool(const std::string&)> fn_;
};

}  // namespace gramforge
