#ifndef PSEUDOMCF_TEST_SUPPORT_HPP_
#define PSEUDOMCF_TEST_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pseudomcf/ambient.hpp"

namespace testing {

// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::vector<double> vec(int n, double lo = -2.0, double hi = 2.0) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }
  pseudomcf::ambient::Signature signature(int max_n = 6) {
    const int n = integer(2, max_n);
    return {integer(0, n), n};
  }
  pseudomcf::ambient::AmbientVec ambient(const pseudomcf::ambient::Signature& sig) {
    return {sig, vec(sig.dim())};
  }

 private:
  std::mt19937_64 rng_;
};

inline constexpr int kCases = 200;

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace testing

#endif  // PSEUDOMCF_TEST_SUPPORT_HPP_
