#include "sublin/events.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sublin/errors.hpp"

namespace sublin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool touches_or_overlaps(const Interval& a, const Interval& b) {
  // a precedes b (a.lo <= b.lo after sorting)
  if (b.lo < a.hi) return true;
  if (b.lo > a.hi) return false;
  return a.hi_closed || b.lo_closed;  // adjacent endpoints merge if either
                                      // side includes the point
}

}  // namespace

EventSet::EventSet(std::vector<Interval> parts) {
  for (auto& p : parts) {
    if (std::isnan(p.lo) || std::isnan(p.hi) || p.lo > p.hi) {
      throw Error("malformed interval in event");
    }
    if (p.lo == p.hi && !(p.lo_closed && p.hi_closed)) {
      throw Error("degenerate open interval in event");
    }
    if (std::isinf(p.lo)) p.lo_closed = false;
    if (std::isinf(p.hi)) p.hi_closed = false;
  }
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
  });
  for (const auto& p : parts) {
    if (!parts_.empty() && touches_or_overlaps(parts_.back(), p)) {
      Interval& last = parts_.back();
      if (p.hi > last.hi || (p.hi == last.hi && p.hi_closed)) {
        last.hi = p.hi;
        last.hi_closed = p.hi_closed;
      }
    } else {
      parts_.push_back(p);
    }
  }
}

EventSet EventSet::greater_than(double t) {
  return EventSet({Interval{t, kInf, false, false}});
}

EventSet EventSet::at_least(double t) {
  return EventSet({Interval{t, kInf, true, false}});
}

EventSet EventSet::abs_greater(double t) {
  if (t < 0) return EventSet({Interval{-kInf, kInf, false, false}});
  return EventSet({Interval{-kInf, -t, false, false},
                   Interval{t, kInf, false, false}});
}

EventSet EventSet::abs_at_least(double t) {
  if (t <= 0) return EventSet({Interval{-kInf, kInf, false, false}});
  return EventSet({Interval{-kInf, -t, false, true},
                   Interval{t, kInf, true, false}});
}

EventSet EventSet::interval(double lo, double hi, bool lo_closed,
                            bool hi_closed) {
  return EventSet({Interval{lo, hi, lo_closed, hi_closed}});
}

EventSet EventSet::complement() const {
  if (parts_.empty()) {
    return EventSet({Interval{-kInf, kInf, false, false}});
  }
  std::vector<Interval> out;
  double cursor = -kInf;
  bool cursor_closed = false;
  for (const auto& p : parts_) {
    const bool gap_nonempty =
        cursor < p.lo || (cursor == p.lo && cursor_closed && !p.lo_closed);
    if (gap_nonempty) {
      out.push_back(Interval{cursor, p.lo, cursor_closed, !p.lo_closed});
    }
    cursor = p.hi;
    cursor_closed = !p.hi_closed;
  }
  if (cursor < kInf) {
    out.push_back(Interval{cursor, kInf, cursor_closed, false});
  }
  return EventSet(std::move(out));
}

std::string EventSet::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) os << " u ";
    const auto& p = parts_[i];
    os << (p.lo_closed ? '[' : '(') << p.lo << ", " << p.hi
       << (p.hi_closed ? ']' : ')');
  }
  if (parts_.empty()) os << "{}";
  return os.str();
}

}  // namespace sublin
