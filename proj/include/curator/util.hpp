#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace curator::util {

// FNV-1a 64-bit. Used for stage digests and seed derivation; not cryptographic.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

std::string hex64(std::uint64_t v);

// Derives a child seed from a base seed plus string keys. Used so every
// sampling stage / group gets an independent generator whose stream does not
// depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t base, std::string_view a,
                          std::string_view b = {});

// Thin deterministic RNG wrapper. std::mt19937_64 is fully specified by the
// standard; the helpers below avoid std::*_distribution, whose output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of randomness.
  double next_double() { return (engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t next_index(std::uint64_t n) { return engine_() % n; }

  double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// printf-style formatting into a std::string.
std::string strformat(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

std::string read_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory followed by rename, so readers
// never observe a partial file. Honors the CURATE_CRASH_AFTER fault-injection
// hook (see commit_guard).
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

// Fault injection: when the environment variable CURATE_CRASH_AFTER is set to
// N, the process exits hard immediately before the N-th commit (rename).
// Exists so crash-recovery behavior is testable from the outside.
void commit_guard();

// Runs fn(i) for i in [0, n) on up to `parallelism` threads. parallelism <= 1
// runs inline. fn must not throw across threads without catching; exceptions
// are captured and the first one is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned parallelism,
                  const std::function<void(std::size_t)>& fn);

std::vector<std::string_view> split_lines(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace curator::util
