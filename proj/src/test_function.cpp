#include "exkin/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "exkin/format.hpp"

namespace exkin {

TestFunction TestFunction::constant() {
  TestFunction f("one", Kind::constant);
  f.sup_bound_ = 1.0;
  return f;
}

TestFunction TestFunction::capped_power(double cap, int power) {
  if (!(cap > 0.0) || power < 0) throw std::domain_error("capped_power needs cap > 0 and power >= 0");
  std::ostringstream name;
  name << "min(x," << format_double(cap) << ")^" << power;
  TestFunction f(name.str(), Kind::capped_power);
  f.a_ = cap;
  f.power_ = power;
  f.sup_bound_ = power == 0 ? 1.0 : std::pow(cap, power);
  return f;
}

TestFunction TestFunction::exponential(double rate) {
  if (!(rate > 0.0)) throw std::domain_error("exponential test function needs rate > 0");
  TestFunction f("exp(-" + format_double(rate) + "x)", Kind::exponential);
  f.a_ = rate;
  f.sup_bound_ = 1.0;
  return f;
}

TestFunction TestFunction::smoothed_indicator(double lo, double hi, double ramp) {
  if (!(lo >= 0.0 && hi >= lo && ramp > 0.0)) throw std::domain_error("smoothed_indicator needs 0 <= lo <= hi, ramp > 0");
  TestFunction f("ind[" + format_double(lo) + "," + format_double(hi) + "]~" + format_double(ramp),
                 Kind::smoothed_indicator);
  f.a_ = lo;
  f.b_ = hi;
  f.w_ = ramp;
  f.sup_bound_ = 1.0;
  return f;
}

TestFunction TestFunction::custom(std::string name, std::function<double(double)> g,
                                  std::function<double(double)> antiderivative, double sup_bound) {
  TestFunction f(std::move(name), Kind::custom);
  f.g_ = std::move(g);
  f.big_g_ = std::move(antiderivative);
  f.sup_bound_ = sup_bound;
  return f;
}

namespace {

// Integral over [0, s] of the trapezoid 0 -> 1 on [lo - w, lo], 1 on
// [lo, hi], 1 -> 0 on [hi, hi + w]; the left ramp is clipped at 0.
double trapezoid_integral(double s, double lo, double hi, double w) {
  auto ramp_up = [&](double x) {  // int_{-inf}^{x} of the rising edge
    const double a = lo - w;
    if (x <= a) return 0.0;
    if (x >= lo) return 0.5 * w;
    const double t = x - a;
    return 0.5 * t * t / w;
  };
  auto ramp_down = [&](double x) {  // int_{hi}^{x} of (1 - descending edge)
    if (x <= hi) return 0.0;
    const double t = std::min(x, hi + w) - hi;
    return 0.5 * t * t / w;
  };
  // int_{-inf}^{x} trapezoid = ramp_up(x) + plateau part - deficit of the falling edge
  auto total_to = [&](double x) {
    double v = ramp_up(x);
    if (x > lo) v += std::min(x, hi + w) - lo;
    v -= ramp_down(x);
    return v;
  };
  return total_to(s) - total_to(0.0);
}

}  // namespace

double TestFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::constant:
      return 1.0;
    case Kind::capped_power:
      return power_ == 0 ? 1.0 : std::pow(std::min(x, a_), power_);
    case Kind::exponential:
      return std::exp(-a_ * x);
    case Kind::smoothed_indicator:
      if (x < a_ - w_ || x > b_ + w_) return 0.0;
      if (x < a_) return (x - (a_ - w_)) / w_;
      if (x > b_) return (b_ + w_ - x) / w_;
      return 1.0;
    case Kind::custom:
      return g_(x);
  }
  return 0.0;
}

double TestFunction::antiderivative(double s) const {
  switch (kind_) {
    case Kind::constant:
      return s;
    case Kind::capped_power: {
      const double k1 = power_ + 1;
      if (s <= a_) return std::pow(s, k1) / k1;
      return std::pow(a_, k1) / k1 + std::pow(a_, power_) * (s - a_);
    }
    case Kind::exponential:
      return -std::expm1(-a_ * s) / a_;
    case Kind::smoothed_indicator:
      return trapezoid_integral(s, a_, b_, w_);
    case Kind::custom:
      return big_g_(s);
  }
  return 0.0;
}

double TestFunction::split_average(double s) const {
  if (s == 0.0) return (*this)(0.0);
  switch (kind_) {
    case Kind::constant:
      return 1.0;
    case Kind::exponential: {
      const double z = a_ * s;
      return z < 1e-8 ? 1.0 - 0.5 * z : -std::expm1(-z) / z;
    }
    case Kind::capped_power:
      if (s <= a_) return std::pow(s, power_) / (power_ + 1);
      return antiderivative(s) / s;
    default:
      return antiderivative(s) / s;
  }
}

bool TestFunction::conserved_below(double cap) const {
  if (kind_ == Kind::constant) return true;
  if (kind_ == Kind::capped_power) return power_ == 0 || (power_ == 1 && a_ >= cap);
  return false;
}

}  // namespace exkin
