#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace hypercount {

// Seeded 64-bit stream. split(i) derives an independent child stream, so
// parallel workers stay deterministic regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  Rng split(std::uint64_t stream) const;
  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }
  double uniform();                       // [0, 1)
  std::size_t below(std::size_t bound);   // uniform on [0, bound)

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace hypercount
