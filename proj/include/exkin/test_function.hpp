#pragma once

#include <functional>
#include <string>

namespace exkin {

// A bounded observable g on [0, inf) carried together with its exact
// antiderivative G(s) = int_0^s g(u) du, so that the uniform-split average
// int_0^1 g(r s) dr = G(s)/s is available in closed form.
class TestFunction {
 public:
  enum class Kind { constant, capped_power, exponential, smoothed_indicator, custom };

  // g = 1.
  static TestFunction constant();
  // g(x) = min(x, cap)^power; cap may be +inf (then sup_bound is +inf).
  static TestFunction capped_power(double cap, int power);
  // g(x) = exp(-rate x).
  static TestFunction exponential(double rate = 1.0);
  // 1 on [lo, hi], linear ramps of the given width outside, 0 beyond.
  static TestFunction smoothed_indicator(double lo, double hi, double ramp = 0.01);
  static TestFunction custom(std::string name, std::function<double(double)> g,
                             std::function<double(double)> antiderivative, double sup_bound);

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  double sup_bound() const { return sup_bound_; }

  double operator()(double x) const;
  double antiderivative(double s) const;
  // G(s)/s, with the limit g(0) at s = 0.
  double split_average(double s) const;

  // True when every exchange with pooled wealth <= cap leaves <g, mu>
  // unchanged (g = 1, or g = x capped at or above cap).
  bool conserved_below(double cap) const;

 private:
  TestFunction(std::string name, Kind kind) : name_(std::move(name)), kind_(kind) {}

  std::string name_;
  Kind kind_;
  double a_ = 0.0;  // cap | rate | lo
  double b_ = 0.0;  // hi
  double w_ = 0.0;  // ramp
  int power_ = 0;
  double sup_bound_ = 1.0;
  std::function<double(double)> g_;
  std::function<double(double)> big_g_;
};

}  // namespace exkin
