#include "curator/location.hpp"

#include <algorithm>
#include <cmath>

#include "curator/util.hpp"

namespace curator::loc {

ChapterIndex::ChapterIndex(std::vector<Chapter> chapters)
    : chapters_(std::move(chapters)) {
  std::sort(chapters_.begin(), chapters_.end(),
            [](const Chapter& a, const Chapter& b) {
              if (a.start_ms != b.start_ms) {
                return a.start_ms < b.start_ms;
              }
              return a.end_ms < b.end_ms;
            });
  subtree_max_.assign(chapters_.size(), 0);
  // Fill subtree max ends bottom-up over the implicit midpoint tree.
  struct Range {
    std::size_t lo, hi;
  };
  std::vector<Range> stack;
  std::vector<Range> order;
  if (!chapters_.empty()) {
    stack.push_back({0, chapters_.size()});
  }
  while (!stack.empty()) {
    const Range r = stack.back();
    stack.pop_back();
    order.push_back(r);
    const std::size_t mid = r.lo + (r.hi - r.lo) / 2;
    if (mid > r.lo) {
      stack.push_back({r.lo, mid});
    }
    if (mid + 1 < r.hi) {
      stack.push_back({mid + 1, r.hi});
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t mid = it->lo + (it->hi - it->lo) / 2;
    Millis m = chapters_[mid].end_ms;
    if (mid > it->lo) {
      const std::size_t left_mid = it->lo + (mid - it->lo) / 2;
      m = std::max(m, subtree_max_[left_mid]);
    }
    if (mid + 1 < it->hi) {
      const std::size_t right_mid = mid + 1 + (it->hi - mid - 1) / 2;
      m = std::max(m, subtree_max_[right_mid]);
    }
    subtree_max_[mid] = m;
  }
}

void ChapterIndex::collect(std::size_t lo, std::size_t hi, Millis t,
                           std::vector<const Chapter*>& out) const {
  if (lo >= hi) {
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  // Half-open intervals: nothing in this subtree can contain t when every
  // end is <= t.
  if (subtree_max_[mid] <= t) {
    return;
  }
  collect(lo, mid, t, out);
  const Chapter& ch = chapters_[mid];
  if (ch.start_ms <= t) {
    if (t < ch.end_ms) {
      out.push_back(&ch);
    }
    collect(mid + 1, hi, t, out);
  }
  // Chapters right of mid all start after ch.start_ms; when t < ch.start_ms
  // none of them can contain t.
}

std::vector<const Chapter*> ChapterIndex::stab(Millis t) const {
  std::vector<const Chapter*> out;
  collect(0, chapters_.size(), t, out);
  return out;
}

std::vector<const Chapter*> ChapterIndex::containing(Millis start, Millis end) const {
  std::vector<const Chapter*> out;
  for (const Chapter* ch : stab(start)) {
    if (end <= ch->end_ms) {
      out.push_back(ch);
    }
  }
  return out;
}

ChapterIndex build_index(const VideoRecord& video) {
  return ChapterIndex(video.chapters);
}

std::optional<Location> match_clip(const ChapterIndex& index, Millis start_ms,
                                   Millis end_ms) {
  const auto matches = index.containing(start_ms, end_ms);
  if (matches.size() != 1) {
    return std::nullopt;
  }
  return matches.front()->location;
}

std::optional<Millis> parse_timestamp_ms(std::string_view text) {
  unsigned h = 0, m = 0, s = 0, frac = 0;
  int frac_digits = 0;
  std::size_t i = 0;
  auto read_uint = [&](unsigned& out, int max_digits) -> bool {
    int digits = 0;
    out = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9' &&
           digits < max_digits) {
      out = out * 10 + static_cast<unsigned>(text[i] - '0');
      ++i;
      ++digits;
    }
    return digits > 0;
  };
  if (!read_uint(h, 6) || i >= text.size() || text[i] != ':') return std::nullopt;
  ++i;
  if (!read_uint(m, 2) || m > 59 || i >= text.size() || text[i] != ':')
    return std::nullopt;
  ++i;
  if (!read_uint(s, 2) || s > 59) return std::nullopt;
  if (i < text.size() && text[i] == '.') {
    ++i;
    const std::size_t before = i;
    if (!read_uint(frac, 3)) return std::nullopt;
    frac_digits = static_cast<int>(i - before);
  }
  if (i != text.size()) {
    return std::nullopt;
  }
  Millis ms = (static_cast<Millis>(h) * 3600 + m * 60 + s) * 1000;
  for (int d = frac_digits; d < 3; ++d) {
    frac *= 10;
  }
  return ms + frac;
}

std::string format_timestamp_ms(Millis t) {
  const Millis total_s = t / 1000;
  const Millis ms = t % 1000;
  const Millis h = total_s / 3600;
  const Millis m = (total_s / 60) % 60;
  const Millis s = total_s % 60;
  if (ms == 0) {
    return util::strformat("%02lld:%02lld:%02lld", static_cast<long long>(h),
                           static_cast<long long>(m), static_cast<long long>(s));
  }
  return util::strformat("%02lld:%02lld:%02lld.%03lld", static_cast<long long>(h),
                         static_cast<long long>(m), static_cast<long long>(s),
                         static_cast<long long>(ms));
}

ChapterParseResult parse_chapter_lines(std::string_view text) {
  ChapterParseResult result;
  const auto lines = util::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = util::trim(lines[i]);
    const std::size_t line_no = i + 1;
    if (line.empty() || line.front() == '#') {
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
      const std::size_t bar = line.find('|', pos);
      if (bar == std::string_view::npos) {
        fields.push_back(util::trim(line.substr(pos)));
        break;
      }
      fields.push_back(util::trim(line.substr(pos, bar - pos)));
      pos = bar + 1;
    }
    if (fields.size() < 3 || fields.size() > 4) {
      result.diagnostics.push_back(
          {line_no, "", "expected 'start-end|CC|City[|Place]'"});
      continue;
    }
    const std::size_t dash = fields[0].find('-');
    if (dash == std::string_view::npos) {
      result.diagnostics.push_back({line_no, "", "missing '-' in timestamp range"});
      continue;
    }
    const auto start = parse_timestamp_ms(util::trim(fields[0].substr(0, dash)));
    const auto end = parse_timestamp_ms(util::trim(fields[0].substr(dash + 1)));
    if (!start || !end) {
      result.diagnostics.push_back({line_no, "", "unparsable timestamp"});
      continue;
    }
    if (*start >= *end) {
      result.diagnostics.push_back({line_no, "", "chapter start is not before end"});
      continue;
    }
    Chapter ch;
    ch.start_ms = *start;
    ch.end_ms = *end;
    ch.location.country_code = std::string(fields[1]);
    ch.location.city = std::string(fields[2]);
    if (fields.size() == 4) {
      ch.location.place = std::string(fields[3]);
    }
    if (!valid_country_code(ch.location.country_code)) {
      result.diagnostics.push_back(
          {line_no, "", "invalid country code '" + ch.location.country_code + "'"});
      continue;
    }
    if (ch.location.city.empty()) {
      result.diagnostics.push_back({line_no, "", "empty city"});
      continue;
    }
    result.chapters.push_back(std::move(ch));
  }
  return result;
}

std::string format_chapter_lines(const std::vector<Chapter>& chapters) {
  std::string out;
  for (const Chapter& ch : chapters) {
    out += format_timestamp_ms(ch.start_ms);
    out += '-';
    out += format_timestamp_ms(ch.end_ms);
    out += '|';
    out += ch.location.country_code;
    out += '|';
    out += ch.location.city;
    if (!ch.location.place.empty()) {
      out += '|';
      out += ch.location.place;
    }
    out += '\n';
  }
  return out;
}

}  // namespace curator::loc
