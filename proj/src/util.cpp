#include "curator/util.hpp"

#include <atomic>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace curator::util {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view a, std::string_view b) {
  std::uint64_t h = fnv1a64_u64(base);
  h = fnv1a64(a, h);
  if (!b.empty()) {
    h = fnv1a64("/", h);
    h = fnv1a64(b, h);
  }
  return h;
}

std::string strformat(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  va_list copy;
  va_copy(copy, args);
  const int n = std::vsnprintf(nullptr, 0, fmt, copy);
  va_end(copy);
  std::string out(n > 0 ? static_cast<std::size_t>(n) : 0, '\0');
  if (n > 0) {
    std::vsnprintf(out.data(), out.size() + 1, fmt, args);
  }
  va_end(args);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file for reading: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

namespace {

// -1 = disabled, otherwise number of commits remaining before hard exit.
std::atomic<long> g_commits_before_crash{-1};
std::once_flag g_crash_init;

}  // namespace

void commit_guard() {
  std::call_once(g_crash_init, [] {
    if (const char* env = std::getenv("CURATE_CRASH_AFTER")) {
      g_commits_before_crash.store(std::atol(env), std::memory_order_relaxed);
    }
  });
  if (g_commits_before_crash.load(std::memory_order_relaxed) < 0) {
    return;
  }
  const long left = g_commits_before_crash.fetch_sub(1, std::memory_order_relaxed);
  if (left <= 1) {
    std::_Exit(137);
  }
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open file for writing: " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw std::runtime_error("short write: " + tmp.string());
    }
  }
  commit_guard();
  fs::rename(tmp, path);
}

void parallel_for(std::size_t n, unsigned parallelism,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) {
    return;
  }
  if (parallelism <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(parallelism, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) {
        return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) {
    threads.emplace_back(work);
  }
  work();
  for (auto& t : threads) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  while (!s.empty() && kSpace.find(s.front()) != std::string_view::npos) {
    s.remove_prefix(1);
  }
  while (!s.empty() && kSpace.find(s.back()) != std::string_view::npos) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace curator::util
