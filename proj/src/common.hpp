#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfonn {

// Error categories map onto process exit codes (config=2, data=3, numeric=4).
enum class ErrKind : int {
  config = 2,
  data = 3,
  numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrKind kind() const { return kind_; }

  static Error config(std::string msg) { return {ErrKind::config, std::move(msg)}; }
  static Error data(std::string msg) { return {ErrKind::data, std::move(msg)}; }
  static Error numeric(std::string msg) { return {ErrKind::numeric, std::move(msg)}; }

 private:
  ErrKind kind_;
};

// printf-style formatting into a std::string.
std::string strfmt(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

// ---------------------------------------------------------------------------
// Logging. Level comes from SELFONN1D_LOG (error|warn|info|debug), default warn.

enum class LogLevel : int { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level();
void set_log_level(LogLevel lv);
void log_msg(LogLevel lv, const std::string& msg);

inline void log_error(const std::string& m) { log_msg(LogLevel::error, m); }
inline void log_warn(const std::string& m) { log_msg(LogLevel::warn, m); }
inline void log_info(const std::string& m) { log_msg(LogLevel::info, m); }
inline void log_debug(const std::string& m) { log_msg(LogLevel::debug, m); }

// ---------------------------------------------------------------------------
// Deterministic RNG: std::mt19937_64 (fully specified engine) plus explicit
// value mappings, so draw sequences never depend on the standard library's
// distribution implementations.

uint64_t splitmix64(uint64_t x);
uint64_t fnv1a64(const std::string& s);

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(splitmix64(seed)) {}

  uint64_t next_u64() { return eng_(); }

  // uniform double in [0, 1) from the top 53 bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform integer in [0, n); n must be > 0. Rejection-free modulo is fine
  // here: n is always tiny relative to 2^64 in this codebase.
  uint64_t below(uint64_t n) { return next_u64() % n; }

  // standard normal via Box-Muller.
  double gauss();

  // Fisher-Yates, descending index, fixed swap order.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(below(i + 1));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace selfonn
