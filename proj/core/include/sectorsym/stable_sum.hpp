#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>

#include <Eigen/Core>

namespace sectorsym {

// Order-invariant accumulator for doubles.
//
// Values are decomposed into 32-bit chunks of their integer mantissa and
// accumulated into fixed-point bins indexed by exponent.  Bin contents are
// exact integer sums, hence independent of the order in which values are
// added.  This makes reductions over permuted index sets bit-identical,
// which the solvers rely on for exact equivariance under grid rotations.
//
// Headroom: each add contributes at most 2^31 per bin, so up to ~2^32
// values can be accumulated before overflow, far beyond any grid size here.
class StableSum {
public:
  StableSum() { bins_.fill(0); }

  void add(double x) {
    if (x == 0.0) return;
    int e = 0;
    const double f = std::frexp(x, &e);           // x = f * 2^e, |f| in [0.5, 1)
    const auto m = static_cast<std::int64_t>(std::ldexp(f, 53));  // exact, |m| < 2^53
    // value = m * 2^(e-53); position relative to bin lattice:
    const int pos = e - 53 + kBias;               // >= 0 for all finite doubles
    const int b = pos >> 5;                       // bin index
    const int r = pos & 31;                       // bit offset inside bin
    // m * 2^r spans at most 85 bits -> three 32-bit chunks (exact split)
    const __int128 p = static_cast<__int128>(m) << r;
    bins_[b] += static_cast<std::int64_t>(p & kMask);
    bins_[b + 1] += static_cast<std::int64_t>((p >> 32) & kMask);
    bins_[b + 2] += static_cast<std::int64_t>(p >> 64);
  }

  void add_product(double a, double b) { add(a * b); }

  // Deterministic conversion of the exact bin contents to double.
  double value() const {
    std::array<std::int64_t, kBins + 2> d{};
    for (int i = 0; i < kBins; ++i) d[i] = bins_[i];
    // carry-propagate to digits in [0, 2^32), top digit signed
    for (int i = 0; i + 1 < static_cast<int>(d.size()); ++i) {
      const std::int64_t carry = d[i] >> 32;  // arithmetic shift (floor)
      d[i] -= carry << 32;
      d[i + 1] += carry;
    }
    long double acc = 0.0L;
    for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) {
      acc = acc * 4294967296.0L + static_cast<long double>(d[i]);
    }
    return static_cast<double>(std::ldexp(acc, -kBias));
  }

private:
  static constexpr int kBias = 1184;  // covers subnormal 2^-1127 .. 2^993 chunk positions
  static constexpr int kBins = 70;
  static constexpr std::int64_t kMask = 0xffffffffLL;
  std::array<std::int64_t, kBins + 3> bins_{};
};

// Order-invariant dot product: per-entry products are formed identically for
// any permutation of the index set, and the accumulation is order-free.
inline double stable_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  StableSum s;
  const auto n = a.size();
  for (Eigen::Index i = 0; i < n; ++i) s.add(a[i] * b[i]);
  return s.value();
}

inline double stable_sum(const Eigen::VectorXd& a) {
  StableSum s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s.add(a[i]);
  return s.value();
}

// Weighted dot sum w[i]*a[i]*b[i]; the product is evaluated in a fixed
// association so permuted traversals produce identical terms.
inline double stable_dot3(const Eigen::VectorXd& w, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b) {
  StableSum s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s.add((w[i] * a[i]) * b[i]);
  return s.value();
}

}  // namespace sectorsym
