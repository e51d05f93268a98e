#pragma once

#include <limits>
#include <string>
#include <vector>

namespace sublin {

// One interval of the real line, possibly unbounded. Closedness of an
// endpoint is irrelevant (and normalized away) when that endpoint is
// infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;
};

// A finite union of intervals, kept sorted and pairwise disjoint.
class EventSet {
 public:
  EventSet() = default;
  explicit EventSet(std::vector<Interval> parts);

  static EventSet greater_than(double t);   // {X > t}
  static EventSet at_least(double t);       // {X >= t}
  static EventSet abs_greater(double t);    // {|X| > t}
  static EventSet abs_at_least(double t);   // {|X| >= t}
  static EventSet interval(double lo, double hi, bool lo_closed = true,
                           bool hi_closed = true);

  EventSet complement() const;
  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  std::string describe() const;

 private:
  std::vector<Interval> parts_;
};

}  // namespace sublin
