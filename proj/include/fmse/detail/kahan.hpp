#pragma once

namespace fmse::detail {

/// Kahan compensated accumulator; keeps long reductions near machine
/// precision independently of term count.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace fmse::detail
