#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "common.hpp"

namespace skewdiff {

// Continuous, strictly increasing piecewise-linear function given by node
// positions, node values and per-segment slopes. Outside the node range the
// function continues linearly with the boundary extrapolation slopes.
class PiecewiseLinearMap {
 public:
  PiecewiseLinearMap() = default;
  PiecewiseLinearMap(std::vector<double> xs, std::vector<double> ys,
                     std::vector<double> slopes, double slope_below, double slope_above)
      : xs_(std::move(xs)),
        ys_(std::move(ys)),
        slopes_(std::move(slopes)),
        slope_below_(slope_below),
        slope_above_(slope_above) {
    if (xs_.size() < 2 || ys_.size() != xs_.size() || slopes_.size() + 1 != xs_.size()) {
      throw DomainError("piecewise linear map: inconsistent table sizes");
    }
  }

  const std::vector<double>& nodes() const { return xs_; }
  const std::vector<double>& values() const { return ys_; }
  const std::vector<double>& slopes() const { return slopes_; }
  double slope_below() const { return slope_below_; }
  double slope_above() const { return slope_above_; }

  double eval(double x) const {
    if (x <= xs_.front()) return ys_.front() + slope_below_ * (x - xs_.front());
    if (x >= xs_.back()) return ys_.back() + slope_above_ * (x - xs_.back());
    const size_t i = segment_index(x);
    return ys_[i] + slopes_[i] * (x - xs_[i]);
  }

  double inverse(double y) const {
    if (y <= ys_.front()) return xs_.front() + (y - ys_.front()) / slope_below_;
    if (y >= ys_.back()) return xs_.back() + (y - ys_.back()) / slope_above_;
    const size_t i = value_segment_index(y);
    return xs_[i] + (y - ys_[i]) / slopes_[i];
  }

  // One-sided slope inside segments, symmetric average at nodes.
  double slope_at(double x) const {
    if (x < xs_.front()) return slope_below_;
    if (x > xs_.back()) return slope_above_;
    auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
    if (it != xs_.end() && *it == x) {
      const size_t i = static_cast<size_t>(it - xs_.begin());
      const double left = (i == 0) ? slope_below_ : slopes_[i - 1];
      const double right = (i + 1 == xs_.size()) ? slope_above_ : slopes_[i];
      return 0.5 * (left + right);
    }
    return slopes_[segment_index(x)];
  }

  // Right-continuous slope lookup by ordinate (for coefficients in the
  // transformed coordinate).
  double slope_at_value(double y) const {
    if (y < ys_.front()) return slope_below_;
    if (y >= ys_.back()) return slope_above_;
    return slopes_[value_segment_index(y)];
  }

  // Visits every linear piece of [lo, hi] as (x_left, x_right, slope, value_at_left).
  template <typename Fn>
  void for_each_segment(double lo, double hi, Fn&& fn) const {
    if (!(lo < hi)) return;
    double x = lo;
    double y = eval(lo);
    while (x < hi) {
      // Next node strictly beyond x, or the interval end.
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      double next = (it == xs_.end()) ? hi : std::min(hi, *it);
      if (!(next > x)) next = hi;
      double s;
      if (x < xs_.front()) {
        s = slope_below_;
        if (next > xs_.front() && hi > xs_.front()) next = std::min(next, xs_.front());
      } else if (x >= xs_.back()) {
        s = slope_above_;
      } else {
        s = slopes_[segment_index(x)];
      }
      fn(x, next, s, y);
      y += s * (next - x);
      x = next;
    }
  }

 private:
  size_t segment_index(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    size_t i = static_cast<size_t>(it - xs_.begin());
    if (i == 0) return 0;
    if (i >= xs_.size()) return xs_.size() - 2;
    return i - 1;
  }

  size_t value_segment_index(double y) const {
    auto it = std::upper_bound(ys_.begin(), ys_.end(), y);
    size_t i = static_cast<size_t>(it - ys_.begin());
    if (i == 0) return 0;
    if (i >= ys_.size()) return ys_.size() - 2;
    return i - 1;
  }

  std::vector<double> xs_, ys_, slopes_;
  double slope_below_ = 1.0, slope_above_ = 1.0;
};

}  // namespace skewdiff
