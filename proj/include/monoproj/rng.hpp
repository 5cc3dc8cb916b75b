#pragma once

#include <cmath>
#include <cstdint>

namespace monoproj {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-style generator built on the splitmix64 output function. Every
// stream is identified by a 64-bit key; substreams hash (key, tag) and are
// therefore reproducible independently of how much the parent stream has been
// consumed. This is what makes simulation replications and bootstrap draws
// order- and parallelism-independent.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key), state_(detail::mix64(key)) {}

  // Child stream for (replication, draw, ...) indices. Derived from the key,
  // not from the consumed state.
  Rng substream(std::uint64_t tag) const {
    return Rng(detail::mix64(key_ + 0x9E3779B97F4A7C15ull * (tag + 1)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return detail::mix64(state_);
  }

  // Uniform on the open interval (0, 1); never returns an exact endpoint so
  // that log/logit transforms stay finite.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mu, double sd) { return mu + sd * normal(); }

  // Gamma(k, 1) for small integer shape k, as a sum of exponentials.
  double gamma_int(int k) {
    double prod = 1.0;
    for (int i = 0; i < k; ++i) prod *= uniform();
    return -std::log(prod);
  }

  // Beta(2, 3) from two gamma draws.
  double beta23() {
    const double g1 = gamma_int(2);
    const double g2 = gamma_int(3);
    return g1 / (g1 + g2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace monoproj
