#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gramforge {

/// Deterministic RNG used across the whole pipeline. All sampling decisions
/// go through one of these so a run is reproducible from a single seed.
using Rng = std::mt19937_64;

std::string sha256_hex(std::string_view data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Splits on runs of spaces/tabs. No quoting; oracle commands with exotic
/// arguments should be wrapped in a shell script.
std::vector<std::string> split_command(std::string_view cmd);

inline std::size_t rand_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace gramforge
