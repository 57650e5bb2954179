#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace tinfer {

enum class Algebra { real, tropical };

// Sum-product operations on plain doubles. Tensor buffers stay unscaled here;
// magnitude control lives in the per-tensor exponent (LabeledTensor::scale).
struct RealOps {
  static constexpr double zero() { return 0.0; }
  static constexpr double one() { return 1.0; }
  static double add(double a, double b) { return a + b; }
  static double mul(double a, double b) { return a * b; }
};

// Max-plus operations on natural-log values. zero() (-inf) absorbs through
// mul since -inf + x == -inf for every finite x; +inf never enters (model
// loading rejects non-finite table entries).
struct TropicalOps {
  static constexpr double zero() { return -std::numeric_limits<double>::infinity(); }
  static constexpr double one() { return 0.0; }
  static double add(double a, double b) { return a > b ? a : b; }
  static double mul(double a, double b) { return a + b; }
};

// Boolean adjoint element for max-plus backpropagation. false corresponds to
// the tropical zero (-inf), true to the tropical one (0).
struct BoolMask {
  bool flag = false;
  double as_tropical() const { return flag ? 0.0 : TropicalOps::zero(); }
};

// A real number held as mantissa * 2^exponent with |mantissa| in [0.5, 1) or
// exactly 0 (then exponent == 0). The wide exponent survives products of
// thousands of factors that would flush a plain double to zero or infinity.
// Normalization only multiplies by powers of two, so it never rounds.
class ScaledReal {
 public:
  ScaledReal() = default;
  explicit ScaledReal(double v) {
    int e = 0;
    mant_ = std::frexp(v, &e);
    exp_ = e;
    canon();
  }

  // Renormalizes, so any (mantissa, exponent) pair is accepted.
  static ScaledReal from_parts(double mantissa, std::int64_t exponent) {
    ScaledReal r;
    int e = 0;
    r.mant_ = std::frexp(mantissa, &e);
    r.exp_ = exponent + e;
    r.canon();
    return r;
  }

  double mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }
  bool is_zero() const { return mant_ == 0.0; }

  // Collapses to a plain double; saturates to 0 or +-inf outside its range.
  double value() const {
    int e = static_cast<int>(std::clamp<std::int64_t>(exp_, -100000, 100000));
    return std::ldexp(mant_, e);
  }

  double log10() const {
    if (mant_ == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log10(std::fabs(mant_)) + static_cast<double>(exp_) * kLog10Of2;
  }

  double ln() const {
    if (mant_ == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::fabs(mant_)) + static_cast<double>(exp_) * kLnOf2;
  }

  friend ScaledReal operator*(const ScaledReal& a, const ScaledReal& b) {
    return from_parts(a.mant_ * b.mant_, a.exp_ + b.exp_);
  }

  friend ScaledReal operator+(const ScaledReal& a, const ScaledReal& b) {
    if (a.mant_ == 0.0) return b;
    if (b.mant_ == 0.0) return a;
    const ScaledReal& hi = a.exp_ >= b.exp_ ? a : b;
    const ScaledReal& lo = a.exp_ >= b.exp_ ? b : a;
    // The low operand is shifted under the high one's exponent; extreme gaps
    // underflow gracefully inside ldexp instead of flushing the whole sum.
    std::int64_t gap = lo.exp_ - hi.exp_;
    double shifted = std::ldexp(lo.mant_, static_cast<int>(std::max<std::int64_t>(gap, -2000)));
    return from_parts(hi.mant_ + shifted, hi.exp_);
  }

  friend ScaledReal operator/(const ScaledReal& a, const ScaledReal& b) {
    return from_parts(a.mant_ / b.mant_, a.exp_ - b.exp_);
  }

  friend bool operator==(const ScaledReal& a, const ScaledReal& b) {
    return a.mant_ == b.mant_ && a.exp_ == b.exp_;
  }

 private:
  static constexpr double kLog10Of2 = 0.30102999566398119521;
  static constexpr double kLnOf2 = 0.69314718055994530942;

  void canon() {
    if (mant_ == 0.0) {
      mant_ = 0.0;  // drops a negative zero
      exp_ = 0;
    }
  }

  double mant_ = 0.0;
  std::int64_t exp_ = 0;
};

// log10 of a plain nonnegative value; zero reports the -inf sentinel.
inline double to_log10(double v) { return ScaledReal(v).log10(); }

}  // namespace tinfer
