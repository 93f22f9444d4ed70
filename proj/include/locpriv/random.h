#ifndef LOCPRIV_RANDOM_H_
#define LOCPRIV_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace locpriv {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed of the substream owned by one trial of one cell. Stable across
// releases: results files depend on it.
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t cell,
                             std::uint64_t trial);

// Random stream built on mt19937_64. Only the raw engine output is used so
// that draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform();

  // Uniform integer in [0, n). Requires n > 0.
  std::size_t uniform_index(std::size_t n);

  // Exponential(1).
  double exponential();

  // Index drawn with probability proportional to probs[i]; probs must sum
  // to 1 (up to rounding).
  std::size_t categorical(std::span<const double> probs);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace locpriv

#endif  // LOCPRIV_RANDOM_H_
