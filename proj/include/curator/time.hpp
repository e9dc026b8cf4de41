#pragma once

#include <cmath>
#include <cstdint>

namespace curator {

// All manifest timestamps are integer milliseconds internally. Manifest files
// carry decimal seconds; conversion quantizes to the nearest millisecond.
using Millis = std::int64_t;

inline constexpr Millis kMillisPerSecond = 1000;

inline Millis millis_from_seconds(double s) {
  return static_cast<Millis>(std::llround(s * 1000.0));
}

inline double seconds_from_millis(Millis ms) {
  return static_cast<double>(ms) / 1000.0;
}

// Frame-grid time of frame `index` at `fps`, floored to milliseconds.
inline Millis frame_time_ms(std::int64_t index, double fps) {
  const double t = static_cast<double>(index) * 1000.0 / fps;
  return static_cast<Millis>(std::floor(t + 1e-6));
}

// Largest ms-quantized frame time that is <= ms (ms must be >= 0). Grid
// points are frame times floored to milliseconds, so the float estimate can
// be off by a frame in either direction; the correction loops make the result
// exact, and with it idempotent: grid_floor(grid_floor(x)) == grid_floor(x).
inline Millis grid_floor(Millis ms, double fps) {
  auto frame =
      static_cast<std::int64_t>(std::floor(static_cast<double>(ms) * fps / 1000.0));
  while (frame > 0 && frame_time_ms(frame, fps) > ms) {
    --frame;
  }
  while (frame_time_ms(frame + 1, fps) <= ms) {
    ++frame;
  }
  return frame_time_ms(frame, fps);
}

struct Interval {
  Millis start_ms = 0;
  Millis end_ms = 0;

  Millis length_ms() const { return end_ms - start_ms; }
  bool empty() const { return end_ms <= start_ms; }
  bool contains(Millis t) const { return start_ms <= t && t < end_ms; }
};

}  // namespace curator
