#include "tunnelchrono/potential.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tunnelchrono::potential {

PotentialProfile::PotentialProfile(std::vector<Segment> segments, double left_level,
                                   double right_level, double origin)
    : segments_(std::move(segments)),
      left_level_(left_level),
      right_level_(right_level),
      origin_(origin),
      total_width_(0.0) {
  if (segments_.empty()) throw std::invalid_argument("PotentialProfile: needs at least one segment");
  if (!std::isfinite(left_level_) || !std::isfinite(right_level_) || !std::isfinite(origin_)) {
    throw std::invalid_argument("PotentialProfile: non-finite level or origin");
  }
  for (const Segment& s : segments_) {
    if (!(s.width > 0.0) || !std::isfinite(s.width)) {
      throw std::invalid_argument("PotentialProfile: every segment width must be positive");
    }
    if (!std::isfinite(s.height)) {
      throw std::invalid_argument("PotentialProfile: non-finite segment height");
    }
    total_width_ += s.width;
  }
}

double PotentialProfile::max_height() const {
  double h = segments_.front().height;
  for (const Segment& s : segments_) h = std::max(h, s.height);
  return h;
}

PotentialProfile rectangular(double height_ev, double width_angstrom) {
  if (!(width_angstrom > 0.0)) throw std::invalid_argument("rectangular: width must be positive");
  return PotentialProfile({{width_angstrom, height_ev}});
}

PotentialProfile discretize(const std::function<double(double)>& f, double x1, double x2, int n) {
  if (!(x1 < x2)) throw std::invalid_argument("discretize: requires x1 < x2");
  if (n < 1) throw std::invalid_argument("discretize: requires n >= 1");
  const double width = (x2 - x1) / n;
  std::vector<Segment> segments;
  segments.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double mid = x1 + (i + 0.5) * width;
    const double h = f(mid);
    if (!std::isfinite(h)) {
      throw std::invalid_argument("discretize: non-finite potential value at x = " + std::to_string(mid));
    }
    segments.push_back({width, h});
  }
  return PotentialProfile(std::move(segments), 0.0, 0.0, x1);
}

PotentialProfile shift_barrier(const PotentialProfile& p, double dv) {
  if (!std::isfinite(dv)) throw std::invalid_argument("shift_barrier: non-finite shift");
  std::vector<Segment> segments = p.segments();
  for (Segment& s : segments) s.height += dv;
  return PotentialProfile(std::move(segments), p.left_level(), p.right_level(), p.origin());
}

PotentialProfile read_profile(std::istream& in) {
  std::vector<Segment> segments;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double width = 0.0, height = 0.0;
    if (!(fields >> width)) continue;  // blank or comment-only line
    if (!(fields >> height)) {
      throw std::invalid_argument("profile line " + std::to_string(line_no) +
                                  ": expected `width_angstrom height_ev`");
    }
    std::string extra;
    if (fields >> extra) {
      throw std::invalid_argument("profile line " + std::to_string(line_no) +
                                  ": trailing content '" + extra + "'");
    }
    segments.push_back({width, height});
  }
  if (segments.empty()) throw std::invalid_argument("profile: no segments found");
  return PotentialProfile(std::move(segments));
}

void write_profile(std::ostream& out, const PotentialProfile& p) {
  char buf[80];
  for (const Segment& s : p.segments()) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g\n", s.width, s.height);
    out << buf;
  }
}

}  // namespace tunnelchrono::potential
