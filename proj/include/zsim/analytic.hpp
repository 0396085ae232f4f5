#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "zsim/rng.hpp"

namespace zsim {

enum class ChainKernel : std::uint8_t { SingleEvent, PerZombieWave };

// Early-outbreak abstraction: zombie count as an absorbing chain. State 0 is
// extinction, states >= cap count as a zombie win ("the horde is now
// unstoppable"). q is the per-decisive-fight probability that the zombie
// loses; escapes change no counts and are conditioned out.
struct ChainSpec {
  double q = 0.0;
  std::uint32_t cap = 5;
  ChainKernel kernel = ChainKernel::SingleEvent;

  void validate() const {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("chain: q must lie in [0,1]");
    if (cap < 2) throw std::invalid_argument("chain: cap must be >= 2");
    if (cap > 4096) throw std::invalid_argument("chain: cap too large for a dense solve");
  }
};

struct ExtinctionResult {
  double extinction_probability = 0.0;  // absorption at 0, starting from one zombie
  double zombie_win_probability = 0.0;
  std::vector<double> absorption_by_state;  // extinction probability from states 1..cap-1
};

namespace detail {

// Dense Gaussian elimination with partial pivoting; A is n x n row-major.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) < 1e-300)
      throw std::runtime_error("chain: singular transition system");
    if (pivot != col) {
      for (std::size_t c = col; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(b[pivot], b[col]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * x[c];
    x[r] = acc / a[r * n + r];
  }
  return x;
}

// pmf of Binomial(z, q) for d = 0..z, via the multiplicative recurrence.
inline std::vector<double> binomial_pmf(std::uint32_t z, double q) {
  std::vector<double> pmf(z + 1, 0.0);
  if (q <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (q >= 1.0) {
    pmf[z] = 1.0;
    return pmf;
  }
  const double ratio = q / (1.0 - q);
  pmf[0] = std::pow(1.0 - q, static_cast<double>(z));
  for (std::uint32_t d = 0; d < z; ++d)
    pmf[d + 1] = pmf[d] * ratio * static_cast<double>(z - d) / static_cast<double>(d + 1);
  return pmf;
}

}  // namespace detail

// Absorption probabilities u(z) = P(extinction | z zombies) solved exactly by
// direct elimination of u(z) = sum_z' P(z -> z') u(z') over the transient
// states 1..cap-1.
//
// SingleEvent: one decisive fight per transition, z -> z-1 with probability q
// and z -> z+1 otherwise (the loser either dies or converts its opponent).
// PerZombieWave: all z zombies fight one decisive round simultaneously;
// D ~ Binomial(z, q) die and every survivor converts one human, z -> 2(z-D).
inline ExtinctionResult extinction_probability(const ChainSpec& spec) {
  spec.validate();
  ExtinctionResult out;
  const std::uint32_t m = spec.cap - 1;  // transient states 1..cap-1
  std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> b(m, 0.0);

  auto at = [&](std::uint32_t row, std::uint32_t col) -> double& {
    return a[static_cast<std::size_t>(row) * m + col];
  };

  for (std::uint32_t z = 1; z <= m; ++z) {
    const std::uint32_t row = z - 1;
    at(row, row) = 1.0;
    if (spec.kernel == ChainKernel::SingleEvent) {
      // u(z) - q*u(z-1) - (1-q)*u(z+1) = 0, with u(0)=1 and u(cap)=0.
      if (z - 1 == 0)
        b[row] += spec.q;
      else
        at(row, z - 2) -= spec.q;
      if (z + 1 < spec.cap) at(row, z) -= 1.0 - spec.q;
    } else {
      const std::vector<double> pmf = detail::binomial_pmf(z, spec.q);
      for (std::uint32_t d = 0; d <= z; ++d) {
        const std::uint32_t to = 2 * (z - d);
        if (to == 0)
          b[row] += pmf[d];
        else if (to < spec.cap)
          at(row, to - 1) -= pmf[d];
        // to >= cap is a zombie win: contributes 0.
      }
    }
  }

  out.absorption_by_state = detail::solve_dense(std::move(a), std::move(b));
  for (double& v : out.absorption_by_state) v = std::clamp(v, 0.0, 1.0);
  out.extinction_probability = out.absorption_by_state.front();
  out.zombie_win_probability = 1.0 - out.extinction_probability;
  return out;
}

// Simulates the abstract chain from one zombie; the independent check of the
// linear solve. Returns the empirical extinction frequency.
inline double chain_monte_carlo(const ChainSpec& spec, std::uint64_t trials, std::uint64_t seed) {
  spec.validate();
  if (trials < 1) throw std::invalid_argument("chain: trials must be >= 1");
  Rng rng(seed);
  std::uint64_t extinct = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::uint32_t z = 1;
    while (z > 0 && z < spec.cap) {
      if (spec.kernel == ChainKernel::SingleEvent) {
        if (rng.bernoulli(spec.q))
          --z;
        else
          ++z;
      } else {
        std::uint32_t deaths = 0;
        for (std::uint32_t i = 0; i < z; ++i)
          if (rng.bernoulli(spec.q)) ++deaths;
        z = 2 * (z - deaths);
      }
    }
    if (z == 0) ++extinct;
  }
  return static_cast<double>(extinct) / static_cast<double>(trials);
}

}  // namespace zsim
