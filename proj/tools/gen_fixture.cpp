// Deterministic generator for the bundled demo map: an Uusimaa-scale region
// (exact total population 1 704 456) with a dense metro area inside a
// quarantine zone, satellite towns, thin rural settlement, a wavy coastline
// and a few lakes. No randomness; the output is a pure function of the
// constants below.

#include <cmath>
#include <cstdint>
#include <deque>
#include <iostream>
#include <string>
#include <vector>

#include "zsim/grid_world.hpp"

namespace {

constexpr std::uint32_t kWidth = 168;
constexpr std::uint32_t kHeight = 96;
constexpr std::uint64_t kTotalPopulation = 1704456;

// Region outline: ellipse centered mid-map.
constexpr double kRegionCx = 84.0;
constexpr double kRegionCy = 52.0;
constexpr double kRegionRx = 80.0;
constexpr double kRegionRy = 42.0;

// Metro center ("center of Helsinki"): on the south coast, mid-map.
constexpr std::int32_t kOriginX = 84;
constexpr std::int32_t kOriginY = 20;

// Quarantine zone around the metro.
constexpr double kQuarantineRx = 19.0;
constexpr double kQuarantineRy = 14.0;

// Population shares. Metro is sized so the quarantine zone holds roughly
// 1.2 million people.
constexpr double kMetroShare = 1200000.0;
constexpr double kMetroSigma = 7.5;
constexpr double kRuralShare = 120000.0;

struct Town {
  double dx, dy;   // offset from the metro center
  double sigma;
  double share;
};

// Satellite towns, loosely following the real settlement pattern: a western
// arm out to the Hanko peninsula, an eastern arm toward Loviisa, and a band
// of commuter towns north of the metro.
constexpr Town kTowns[] = {
    {+32.0, +6.0, 2.2, 55000.0},   // Porvoo
    {-36.0, +10.0, 2.4, 50000.0},  // Lohja
    {-6.0, +34.0, 2.2, 50000.0},   // Hyvinkae
    {+8.0, +24.0, 2.0, 60000.0},   // Jaervenpaeae/Kerava corridor
    {-20.0, +1.0, 2.0, 32000.0},   // Kirkkonummi
    {0.0, +22.0, 1.8, 30000.0},    // Tuusula
    {-14.0, +26.0, 2.0, 35000.0},  // Nurmijaervi
    {+16.0, +36.0, 1.8, 20000.0},  // Maentsaelae
    {-62.0, -2.0, 2.6, 28000.0},   // Raseborg
    {-74.0, -6.0, 1.6, 8000.0},    // Hanko
    {+52.0, +4.0, 2.0, 15000.0},   // Loviisa
    {+64.0, +14.0, 1.5, 6456.0},   // eastern edge villages
};

double coast_y(double x) {
  return 14.0 + 5.0 * std::sin(x / 9.0) + 3.0 * std::sin(x / 23.0 + 1.7);
}

struct Lake {
  double cx, cy, rx, ry;
};

constexpr Lake kLakes[] = {
    {40.0, 60.0, 6.0, 4.0},
    {120.0, 64.0, 5.0, 7.0},
    {66.0, 76.0, 4.0, 3.0},
    {100.0, 40.0, 3.0, 3.0},
    {56.0, 34.0, 4.0, 2.5},
};

bool in_region(double x, double y) {
  const double ex = (x - kRegionCx) / kRegionRx;
  const double ey = (y - kRegionCy) / kRegionRy;
  if (ex * ex + ey * ey > 1.0) return false;
  if (y < coast_y(x)) return false;  // sea
  for (const Lake& lake : kLakes) {
    const double lx = (x - lake.cx) / lake.rx;
    const double ly = (y - lake.cy) / lake.ry;
    if (lx * lx + ly * ly <= 1.0) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_path = argc > 1 ? argv[1] : "uusimaa_fixture.csv";

  const std::size_t n = static_cast<std::size_t>(kWidth) * kHeight;
  std::vector<std::uint8_t> passable(n, 0);
  for (std::uint32_t y = 0; y < kHeight; ++y)
    for (std::uint32_t x = 0; x < kWidth; ++x)
      passable[y * kWidth + x] = in_region(x, y) ? 1 : 0;

  // Keep only the component connected to the origin so every populated cell
  // is reachable by the epidemic.
  {
    std::vector<std::uint8_t> reach(n, 0);
    std::deque<std::uint32_t> queue;
    const std::uint32_t start = static_cast<std::uint32_t>(kOriginY) * kWidth + kOriginX;
    if (!passable[start]) {
      std::cerr << "origin cell is not passable; adjust the outline constants\n";
      return 1;
    }
    reach[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::uint32_t idx = queue.front();
      queue.pop_front();
      const std::int32_t cx = static_cast<std::int32_t>(idx % kWidth);
      const std::int32_t cy = static_cast<std::int32_t>(idx / kWidth);
      for (int d = 0; d < 8; ++d) {
        const std::int32_t nx = cx + zsim::kDirDx[d];
        const std::int32_t ny = cy + zsim::kDirDy[d];
        if (nx < 0 || ny < 0 || nx >= static_cast<std::int32_t>(kWidth) ||
            ny >= static_cast<std::int32_t>(kHeight))
          continue;
        const std::uint32_t nidx = static_cast<std::uint32_t>(ny) * kWidth + nx;
        if (passable[nidx] && !reach[nidx]) {
          reach[nidx] = 1;
          queue.push_back(nidx);
        }
      }
    }
    passable = std::move(reach);
  }

  std::vector<std::uint32_t> cells;
  for (std::uint32_t idx = 0; idx < n; ++idx)
    if (passable[idx]) cells.push_back(idx);

  // Component weights, each pre-scaled to its absolute share.
  std::vector<double> weight(cells.size(), 0.0);
  auto add_gaussian = [&](double cx, double cy, double sigma, double share) {
    double sum = 0.0;
    std::vector<double> w(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double x = static_cast<double>(cells[i] % kWidth);
      const double y = static_cast<double>(cells[i] / kWidth);
      const double dx = x - cx;
      const double dy = y - cy;
      w[i] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      sum += w[i];
    }
    for (std::size_t i = 0; i < cells.size(); ++i) weight[i] += w[i] * share / sum;
  };

  add_gaussian(kOriginX, kOriginY, kMetroSigma, kMetroShare);
  for (const Town& t : kTowns)
    add_gaussian(kOriginX + t.dx, kOriginY + t.dy, t.sigma, t.share);
  for (std::size_t i = 0; i < cells.size(); ++i)
    weight[i] += kRuralShare / static_cast<double>(cells.size());

  // Exact apportionment, largest remainder, ties to the lowest cell index.
  double weight_sum = 0.0;
  for (double w : weight) weight_sum += w;
  std::vector<std::uint32_t> population(n, 0);
  std::uint64_t assigned = 0;
  std::vector<std::pair<double, std::uint32_t>> rem;
  rem.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double target = static_cast<double>(kTotalPopulation) * weight[i] / weight_sum;
    const auto base = static_cast<std::uint64_t>(target);
    population[cells[i]] = static_cast<std::uint32_t>(base);
    assigned += base;
    rem.emplace_back(-(target - static_cast<double>(base)), static_cast<std::uint32_t>(i));
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::uint64_t leftover = kTotalPopulation - assigned, i = 0; leftover > 0; --leftover, ++i)
    population[cells[rem[i].second]] += 1;

  std::vector<std::uint8_t> quarantine(n, 0);
  std::uint64_t quarantine_pop = 0;
  for (std::uint32_t idx : cells) {
    const double x = static_cast<double>(idx % kWidth);
    const double y = static_cast<double>(idx / kWidth);
    const double ex = (x - kOriginX) / kQuarantineRx;
    const double ey = (y - kOriginY) / kQuarantineRy;
    if (ex * ex + ey * ey <= 1.0) {
      quarantine[idx] = 1;
      quarantine_pop += population[idx];
    }
  }

  const zsim::GridWorld world(kWidth, kHeight, std::move(passable), std::move(population),
                              std::move(quarantine), zsim::Cell{kOriginX, kOriginY});
  zsim::save_raster(world, out_path);

  std::cout << "wrote " << out_path << "\n";
  std::cout << "  cells: " << cells.size() << ", population: " << world.total_population()
            << " (inside quarantine: " << quarantine_pop << ")\n";
  std::cout << "  origin: (" << kOriginX << "," << kOriginY << ") pop "
            << world.population(world.origin()) << "\n";
  return 0;
}
