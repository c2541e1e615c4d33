#include "hypercount/rng.hpp"

namespace hypercount {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t a = splitmix64(seed), b = splitmix64(seed ^ splitmix64(stream + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(stream == 0 ? seed : splitmix64(seed) ^ splitmix64(~stream)),
      engine_(make_engine(seed, stream)) {}

Rng Rng::split(std::uint64_t stream) const { return Rng(seed_, stream + 1); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t bound) {
  if (bound <= 1) return 0;
  std::uint64_t threshold = (0 - static_cast<std::uint64_t>(bound)) % bound;
  for (;;) {
    std::uint64_t x = engine_();
    if (x >= threshold) return static_cast<std::size_t>(x % bound);
  }
}

}  // namespace hypercount
