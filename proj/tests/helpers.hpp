#pragma once

#include <random>
#include <vector>

#include "ringbif/system.hpp"

namespace testing_helpers {

/// Every family exercised by the grid tests, at a given n and mu.
inline std::vector<ringbif::SystemSpec> families(int n, double mu, std::vector<double> alphas = {1.0, 2.0, 2.5}) {
  using ringbif::DnlsPotential;
  using ringbif::SystemSpec;
  std::vector<SystemSpec> out;
  for (double a : alphas) out.push_back(SystemSpec::celestial(a, n, mu));
  if (n >= 3) {
    out.push_back(SystemSpec::dnls(DnlsPotential::cubic(), n, mu));
    out.push_back(SystemSpec::dnls(DnlsPotential::saturable(), n, mu));
  }
  return out;
}

/// Polygon plus a seeded perturbation of size `scale`.
inline ringbif::Configuration jittered(const ringbif::Configuration& base, double scale, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  ringbif::Configuration x = base;
  for (int i = 0; i < x.coords.size(); ++i) x.coords(i) += u(rng);
  return x;
}

} // namespace testing_helpers
