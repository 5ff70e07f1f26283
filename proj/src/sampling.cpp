#include "gradedrm/sampling.hpp"

#include <stdexcept>

#include "gradedrm/rmatrix.hpp"

namespace gradedrm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = splitmix64(seed);
  for (unsigned char ch : tag) h = splitmix64(h ^ ch);
  return h;
}

double Sampler::uniform() { return double(rng_() >> 11) * 0x1.0p-53; }

cplx Sampler::spectral() {
  double x = uniform();
  while (x == 0.0) x = uniform();
  const double y = 0.1 + 0.4 * uniform();
  return {x, y};
}

std::vector<cplx> Sampler::draw(
    int count, const std::function<std::vector<cplx>(std::span<const cplx>)>& critical) {
  std::vector<cplx> values(static_cast<size_t>(count));
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    for (auto& v : values) v = spectral();
    bool clear = true;
    for (cplx c : critical(values))
      if (lattice_distance(c) <= kPoleMargin) {
        clear = false;
        break;
      }
    if (clear) return values;
    ++resamples_;
  }
  throw std::runtime_error("no pole-free sample after 100 attempts");
}

}  // namespace gradedrm
