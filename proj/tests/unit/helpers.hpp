#pragma once

#include <random>
#include <vector>

#include "ristrack/scenario.hpp"
#include "ristrack/types.hpp"

namespace ristrack::testing {

// Default room with small RISs so the tests stay fast.
inline Scenario small_scenario(int rows = 8, int cols = 2, int num_ris = 3) {
  Scenario s = default_scenario();
  s.ris.resize(num_ris);
  for (auto& r : s.ris) {
    r.n_rows = rows;
    r.n_cols = cols;
  }
  s.optimizer.n_samples = 60;
  s.optimizer.pi_samples = 20;
  return s;
}

inline CVec random_phases(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  CVec c(n);
  for (int i = 0; i < n; ++i) c(i) = std::polar(1.0, u(rng));
  return c;
}

inline CMat random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cd(n(rng), n(rng));
  return m;
}

}  // namespace ristrack::testing
