#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gasmor {

/// Error type carrying a short context tag, e.g. "netgraph: malformed row 3".
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

// ---- string helpers ----

std::string trim(std::string_view s);

/// Split on any of the given delimiter characters, dropping empty tokens.
std::vector<std::string> split_any(std::string_view s, std::string_view delims);

/// Strict double parse; the whole token must be consumed.
double parse_double(const std::string& tok, const std::string& context);

// ---- hashing ----

/// FNV-1a, used for content keys of networks, models and training setups.
struct Fnv64 {
  std::uint64_t h = 1469598103934665603ull;
  void add_bytes(const void* data, std::size_t n);
  void add(std::string_view s) { add_bytes(s.data(), s.size()); }
  void add(double v) { add_bytes(&v, sizeof v); }
  void add(std::uint64_t v) { add_bytes(&v, sizeof v); }
  void add(int v) { add_bytes(&v, sizeof v); }
  std::uint64_t value() const { return h; }
};

std::string hex64(std::uint64_t v);

// ---- portable uniform RNG ----

/// xoshiro-free deterministic uniform in [0,1); std distributions are not
/// reproducible across standard libraries, this is.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next_u64();
  double uniform();                        // [0,1)
  double uniform(double lo, double hi);    // [lo,hi)
 private:
  std::uint64_t state_;
};

// ---- parallel job pool ----

/// Runs jobs [0,n) on `workers` threads in fixed round-robin chunks so any
/// caller-side reduction over job index order is deterministic.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job);

int default_workers();

// ---- timing ----

double now_seconds();

}  // namespace gasmor
