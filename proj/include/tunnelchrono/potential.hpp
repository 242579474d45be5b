#ifndef TUNNELCHRONO_POTENTIAL_HPP
#define TUNNELCHRONO_POTENTIAL_HPP

#include <functional>
#include <iosfwd>
#include <vector>

// Piecewise-constant 1D potential profiles: the barrier every 1D scattering
// and time computation consumes. Profiles are immutable values.
namespace tunnelchrono::potential {

struct Segment {
  double width;   // Angstrom, > 0
  double height;  // eV
};

class PotentialProfile {
 public:
  explicit PotentialProfile(std::vector<Segment> segments, double left_level = 0.0,
                            double right_level = 0.0, double origin = 0.0);

  const std::vector<Segment>& segments() const { return segments_; }
  double left_level() const { return left_level_; }
  double right_level() const { return right_level_; }
  double origin() const { return origin_; }

  double total_width() const { return total_width_; }
  double max_height() const;

  // Barrier region [x1, x2]
  double entrance() const { return origin_; }
  double exit() const { return origin_ + total_width_; }

 private:
  std::vector<Segment> segments_;
  double left_level_;
  double right_level_;
  double origin_;
  double total_width_;
};

// Single segment of the given height and width, zero asymptotic levels,
// origin at 0.
PotentialProfile rectangular(double height_ev, double width_angstrom);

// n equal-width segments over [x1, x2]; each height is f at the segment
// midpoint. Total width is preserved exactly.
PotentialProfile discretize(const std::function<double(double)>& f, double x1, double x2, int n);

// All segment heights raised by dv; asymptotic levels unchanged. This is the
// barrier-height modulation direction used by the Buettiker-Landauer and
// Larmor times.
PotentialProfile shift_barrier(const PotentialProfile& p, double dv);

// Text format: one line per segment, `width_angstrom height_ev`, `#` comments.
PotentialProfile read_profile(std::istream& in);
void write_profile(std::ostream& out, const PotentialProfile& p);

}  // namespace tunnelchrono::potential

#endif
