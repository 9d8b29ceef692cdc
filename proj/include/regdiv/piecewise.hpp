#pragma once

#include <array>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "regdiv/model.hpp"

namespace regdiv {

// coeff * exp(exponent * (x - anchor)); anchoring keeps the magnitudes tame.
struct ExpTerm {
  double exponent = 0.0;
  double coeff = 0.0;
  double anchor = 0.0;
};

struct Segment {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  std::vector<ExpTerm> terms;
  double intercept = 0.0;
  double slope = 0.0;
  // Smoothness class required where this segment meets its left neighbour
  // (or the zero extension below theta for the first segment).
  int smoothness = 0;
  std::string label;

  double eval(double x, int order) const;
};

enum class Side { Left, Right };

struct Junction {
  Regime regime;
  double x;
  int smoothness;
  std::string label;
};

class PiecewiseValue {
 public:
  PiecewiseValue() = default;
  PiecewiseValue(double theta1, double theta2) : theta_{theta1, theta2} {}

  void set_segments(Regime r, std::vector<Segment> segs);
  std::span<const Segment> segments(Regime r) const { return segs_[index_of(r)]; }
  double theta(Regime r) const { return theta_[index_of(r)]; }

  // Order 0..3. Points sitting on a junction use the right-hand segment.
  double eval(double x, Regime r, int order = 0) const;
  // One-sided limit at x; the side picks the segment owning (x-, x) or (x, x+).
  double eval_side(double x, Regime r, int order, Side side) const;

  // Interior junctions (including the one at theta) with their smoothness class.
  std::vector<Junction> junctions() const;

 private:
  const Segment* locate(double x, Regime r, Side side) const;
  std::array<double, 2> theta_{0.0, 0.0};
  std::array<std::vector<Segment>, 2> segs_;
};

}  // namespace regdiv
