#include "regdiv/piecewise.hpp"

#include <cmath>

namespace regdiv {

double Segment::eval(double x, int order) const {
  double v = 0.0;
  for (const auto& t : terms) v += t.coeff * std::pow(t.exponent, order) * std::exp(t.exponent * (x - t.anchor));
  if (order == 0) v += intercept + slope * x;
  if (order == 1) v += slope;
  return v;
}

void PiecewiseValue::set_segments(Regime r, std::vector<Segment> segs) {
  if (segs.empty()) throw std::invalid_argument("a regime needs at least one segment");
  for (std::size_t i = 0; i + 1 < segs.size(); ++i)
    if (segs[i].hi != segs[i + 1].lo) throw std::invalid_argument("segments must be contiguous");
  if (!std::isinf(segs.back().hi)) throw std::invalid_argument("last segment must be unbounded");
  segs_[index_of(r)] = std::move(segs);
}

const Segment* PiecewiseValue::locate(double x, Regime r, Side side) const {
  const auto& segs = segs_[index_of(r)];
  if (segs.empty()) return nullptr;
  for (const auto& s : segs) {
    const bool inside = side == Side::Right ? (x >= s.lo && x < s.hi) : (x > s.lo && x <= s.hi);
    if (inside) return &s;
  }
  return x >= segs.back().hi ? &segs.back() : nullptr;
}

double PiecewiseValue::eval(double x, Regime r, int order) const {
  if (x <= theta(r)) return 0.0;
  const Segment* s = locate(x, r, Side::Right);
  return s ? s->eval(x, order) : 0.0;
}

double PiecewiseValue::eval_side(double x, Regime r, int order, Side side) const {
  if (side == Side::Left ? x <= theta(r) : x < theta(r)) return 0.0;
  const Segment* s = locate(x, r, side);
  return s ? s->eval(x, order) : 0.0;
}

std::vector<Junction> PiecewiseValue::junctions() const {
  std::vector<Junction> out;
  for (Regime r : {Regime::One, Regime::Two})
    for (const auto& s : segs_[index_of(r)])
      if (s.lo > theta(r) || (&s == &segs_[index_of(r)].front()))
        out.push_back({r, s.lo, s.smoothness, s.label});
  return out;
}

}  // namespace regdiv
