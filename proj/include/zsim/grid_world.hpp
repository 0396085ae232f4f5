#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zsim {

// One 1km-by-1km raster square. x grows east, y grows north.
struct Cell {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// The eight neighbor directions in the fixed order E, NE, N, NW, W, SW, S,
// SE. Consecutive entries are 45 degrees apart, so the two edge-sharing
// companions of direction d are (d+1)%8 and (d+7)%8.
inline constexpr std::array<std::int32_t, 8> kDirDx = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr std::array<std::int32_t, 8> kDirDy = {0, 1, 1, 1, 0, -1, -1, -1};

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable rasterized geography: passability, initial population and
// quarantine membership per cell, plus the outbreak origin. Construction
// validates all invariants; afterwards the world is safe to share read-only
// across concurrent runs.
class GridWorld {
 public:
  GridWorld(std::uint32_t width, std::uint32_t height,
            std::vector<std::uint8_t> passable,
            std::vector<std::uint32_t> population,
            std::vector<std::uint8_t> quarantine, Cell origin,
            bool require_population = false)
      : width_(width),
        height_(height),
        passable_(std::move(passable)),
        population_(std::move(population)),
        quarantine_(std::move(quarantine)),
        origin_(origin) {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    if (width_ == 0 || height_ == 0) throw MapError("world dimensions must be positive");
    if (passable_.size() != n || population_.size() != n || quarantine_.size() != n)
      throw MapError("world layer size mismatch");
    total_population_ = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!passable_[i] && population_[i] != 0)
        throw MapError("population on impassable cell");
      if (quarantine_[i] && !passable_[i])
        throw MapError("quarantine flag on impassable cell");
      total_population_ += population_[i];
    }
    if (!contains(origin_) || !passable_[index(origin_)])
      throw MapError("origin cell is not passable");
    if (require_population && total_population_ == 0)
      throw MapError("world has no population");
    build_neighbor_masks();
  }

  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  Cell origin() const { return origin_; }
  std::uint64_t total_population() const { return total_population_; }
  std::size_t cell_count() const { return passable_.size(); }

  bool contains(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < static_cast<std::int32_t>(width_) &&
           c.y < static_cast<std::int32_t>(height_);
  }

  std::uint32_t index(Cell c) const {
    return static_cast<std::uint32_t>(c.y) * width_ + static_cast<std::uint32_t>(c.x);
  }
  Cell cell_at(std::uint32_t idx) const {
    return Cell{static_cast<std::int32_t>(idx % width_), static_cast<std::int32_t>(idx / width_)};
  }

  bool passable(Cell c) const { return contains(c) && passable_[index(c)] != 0; }
  bool passable_index(std::uint32_t idx) const { return passable_[idx] != 0; }
  std::uint32_t population(Cell c) const { return population_[index(c)]; }
  std::uint32_t population_index(std::uint32_t idx) const { return population_[idx]; }
  bool in_quarantine(Cell c) const { return quarantine_[index(c)] != 0; }
  bool in_quarantine_index(std::uint32_t idx) const { return quarantine_[idx] != 0; }

  // Bit d is set when the neighbor in direction d is in bounds and passable.
  std::uint8_t neighbor_mask(std::uint32_t idx) const { return neighbor_mask_[idx]; }

  // Cell-index delta of one step in direction d; valid whenever the
  // corresponding neighbor_mask bit is set.
  std::int32_t dir_offset(int d) const { return dir_offset_[d]; }

  std::uint32_t neighbor_index(std::uint32_t idx, int d) const {
    return static_cast<std::uint32_t>(static_cast<std::int64_t>(idx) + dir_offset_[d]);
  }

  // The passable, in-bounds subset of the eight geometric neighbors, in the
  // fixed direction order.
  std::vector<Cell> neighbors(Cell c) const {
    std::vector<Cell> out;
    out.reserve(8);
    const std::uint8_t mask = neighbor_mask_[index(c)];
    for (int d = 0; d < 8; ++d)
      if (mask & (1u << d)) out.push_back(Cell{c.x + kDirDx[d], c.y + kDirDy[d]});
    return out;
  }

 private:
  void build_neighbor_masks() {
    const auto w = static_cast<std::int32_t>(width_);
    for (int d = 0; d < 8; ++d) dir_offset_[d] = kDirDx[d] + w * kDirDy[d];
    neighbor_mask_.assign(passable_.size(), 0);
    for (std::uint32_t y = 0; y < height_; ++y) {
      for (std::uint32_t x = 0; x < width_; ++x) {
        const Cell c{static_cast<std::int32_t>(x), static_cast<std::int32_t>(y)};
        std::uint8_t mask = 0;
        for (int d = 0; d < 8; ++d) {
          const Cell n{c.x + kDirDx[d], c.y + kDirDy[d]};
          if (passable(n)) mask |= static_cast<std::uint8_t>(1u << d);
        }
        neighbor_mask_[index(c)] = mask;
      }
    }
  }

  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<std::uint8_t> passable_;
  std::vector<std::uint32_t> population_;
  std::vector<std::uint8_t> quarantine_;
  std::vector<std::uint8_t> neighbor_mask_;
  std::array<std::int32_t, 8> dir_offset_{};
  Cell origin_;
  std::uint64_t total_population_ = 0;
};

inline std::vector<Cell> neighbors(const GridWorld& world, Cell c) { return world.neighbors(c); }
inline bool in_quarantine(const GridWorld& world, Cell c) { return world.in_quarantine(c); }

namespace detail {

inline void trim(std::string_view& s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
}

inline bool parse_i64(std::string_view s, std::int64_t& out) {
  trim(s);
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

[[noreturn]] inline void load_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw MapError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace detail

// Loads a map CSV (header `x,y,population,quarantine`, one row per passable
// cell, '#' comments). Cells absent from the file are impassable with
// population 0; width and height are derived from the largest listed
// coordinates. The origin comes from the run configuration, not the file.
inline GridWorld load_raster(const std::string& path, Cell origin) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapError(path + ": cannot open map file");

  struct Row {
    std::int32_t x, y;
    std::uint32_t pop;
    bool quarantine;
    std::size_t line;
  };
  std::vector<Row> rows;
  constexpr std::int64_t kMaxCoord = 60000;

  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "x,y,population,quarantine")
        detail::load_fail(path, line_no, "expected header 'x,y,population,quarantine'");
      header_seen = true;
      continue;
    }
    std::array<std::string_view, 4> fields;
    std::size_t field_count = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (field_count >= 4) detail::load_fail(path, line_no, "malformed row: too many fields");
        fields[field_count++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (field_count != 4) detail::load_fail(path, line_no, "malformed row: expected 4 fields");
    std::int64_t x, y, pop, quar;
    if (!detail::parse_i64(fields[0], x) || !detail::parse_i64(fields[1], y) ||
        !detail::parse_i64(fields[2], pop) || !detail::parse_i64(fields[3], quar))
      detail::load_fail(path, line_no, "malformed row: fields must be integers");
    if (x < 0 || y < 0 || x > kMaxCoord || y > kMaxCoord)
      detail::load_fail(path, line_no, "out-of-bounds coordinate");
    if (pop < 0) detail::load_fail(path, line_no, "negative population");
    if (pop > std::numeric_limits<std::int32_t>::max())
      detail::load_fail(path, line_no, "population out of range");
    if (quar != 0 && quar != 1) detail::load_fail(path, line_no, "quarantine flag must be 0 or 1");
    rows.push_back(Row{static_cast<std::int32_t>(x), static_cast<std::int32_t>(y),
                       static_cast<std::uint32_t>(pop), quar == 1, line_no});
  }
  if (!header_seen) throw MapError(path + ": missing header");
  if (rows.empty()) throw MapError(path + ": no passable cells listed");

  std::uint32_t width = 0, height = 0;
  for (const Row& r : rows) {
    width = std::max(width, static_cast<std::uint32_t>(r.x) + 1);
    height = std::max(height, static_cast<std::uint32_t>(r.y) + 1);
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<std::uint8_t> passable(n, 0);
  std::vector<std::uint32_t> population(n, 0);
  std::vector<std::uint8_t> quarantine(n, 0);
  for (const Row& r : rows) {
    const std::size_t idx = static_cast<std::size_t>(r.y) * width + r.x;
    if (passable[idx]) detail::load_fail(path, r.line, "duplicate cell");
    passable[idx] = 1;
    population[idx] = r.pop;
    quarantine[idx] = r.quarantine ? 1 : 0;
  }

  const std::size_t origin_idx = static_cast<std::size_t>(origin.y) * width + origin.x;
  if (origin.x < 0 || origin.y < 0 || static_cast<std::uint32_t>(origin.x) >= width ||
      static_cast<std::uint32_t>(origin.y) >= height || !passable[origin_idx])
    throw MapError(path + ": invalid origin (" + std::to_string(origin.x) + "," +
                   std::to_string(origin.y) + ") is not a passable cell");

  return GridWorld(width, height, std::move(passable), std::move(population),
                   std::move(quarantine), origin, /*require_population=*/true);
}

// Writes a world in the map CSV format, rows in cell-index order. Reloading
// the output with the same origin reproduces the world exactly.
inline void save_raster(const GridWorld& world, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MapError(path + ": cannot open for writing");
  out << "x,y,population,quarantine\n";
  for (std::uint32_t idx = 0; idx < world.cell_count(); ++idx) {
    if (!world.passable_index(idx)) continue;
    const Cell c = world.cell_at(idx);
    out << c.x << ',' << c.y << ',' << world.population_index(idx) << ','
        << (world.in_quarantine_index(idx) ? 1 : 0) << '\n';
  }
  if (!out) throw MapError(path + ": write failed");
}

enum class Placement : std::uint8_t { Uniform, Hotspot };

struct RectSpec {
  std::int32_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive corners

  bool contains(Cell c) const { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; }
};

// Recipe for a deterministic synthetic test world.
struct SyntheticSpec {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Placement placement = Placement::Uniform;
  std::uint64_t total_population = 0;
  std::optional<Cell> hotspot_center;       // default: map center
  double hotspot_sigma = 0.0;               // default: min(width, height) / 4
  std::optional<RectSpec> quarantine;
  std::vector<RectSpec> impassable;
  std::optional<Cell> origin;               // default: hotspot center, else first passable cell
};

// Deterministic synthetic world. Population follows the placement rule with
// fractional remainders assigned largest-first, ties to the lowest cell
// index, so equal-weight cells fill lowest-index-first.
inline GridWorld synthetic_world(const SyntheticSpec& spec) {
  if (spec.width == 0 || spec.height == 0) throw MapError("synthetic world dimensions must be positive");
  const std::int32_t w = static_cast<std::int32_t>(spec.width);
  const std::int32_t h = static_cast<std::int32_t>(spec.height);
  auto check_rect = [&](const RectSpec& r) {
    if (r.x0 < 0 || r.y0 < 0 || r.x1 >= w || r.y1 >= h || r.x0 > r.x1 || r.y0 > r.y1)
      throw MapError("synthetic rectangle out of bounds");
  };
  if (spec.quarantine) check_rect(*spec.quarantine);
  for (const RectSpec& r : spec.impassable) check_rect(r);

  const std::size_t n = static_cast<std::size_t>(spec.width) * spec.height;
  std::vector<std::uint8_t> passable(n, 1);
  std::vector<std::uint8_t> quarantine(n, 0);
  for (std::uint32_t idx = 0; idx < n; ++idx) {
    const Cell c{static_cast<std::int32_t>(idx % spec.width), static_cast<std::int32_t>(idx / spec.width)};
    for (const RectSpec& r : spec.impassable)
      if (r.contains(c)) passable[idx] = 0;
    if (passable[idx] && spec.quarantine && spec.quarantine->contains(c)) quarantine[idx] = 1;
  }

  std::vector<std::uint32_t> passable_cells;
  for (std::uint32_t idx = 0; idx < n; ++idx)
    if (passable[idx]) passable_cells.push_back(idx);
  if (passable_cells.empty()) throw MapError("synthetic world has no passable cells");
  if (spec.total_population > 0 && passable_cells.empty())
    throw MapError("population requested on zero passable cells");

  const Cell center = spec.hotspot_center.value_or(
      Cell{static_cast<std::int32_t>(spec.width / 2), static_cast<std::int32_t>(spec.height / 2)});
  const double sigma = spec.hotspot_sigma > 0.0
                           ? spec.hotspot_sigma
                           : std::max(1.0, std::min(spec.width, spec.height) / 4.0);

  std::vector<double> weight(passable_cells.size(), 1.0);
  if (spec.placement == Placement::Hotspot) {
    for (std::size_t i = 0; i < passable_cells.size(); ++i) {
      const Cell c{static_cast<std::int32_t>(passable_cells[i] % spec.width),
                   static_cast<std::int32_t>(passable_cells[i] / spec.width)};
      const double dx = c.x - center.x;
      const double dy = c.y - center.y;
      weight[i] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  double weight_sum = 0.0;
  for (double v : weight) weight_sum += v;

  // Largest-remainder apportionment of the exact total.
  std::vector<std::uint32_t> population(n, 0);
  std::uint64_t assigned = 0;
  std::vector<std::pair<double, std::uint32_t>> remainders;  // (-fraction, order)
  remainders.reserve(passable_cells.size());
  for (std::size_t i = 0; i < passable_cells.size(); ++i) {
    const double target = static_cast<double>(spec.total_population) * weight[i] / weight_sum;
    const auto base = static_cast<std::uint64_t>(target);
    population[passable_cells[i]] = static_cast<std::uint32_t>(base);
    assigned += base;
    remainders.emplace_back(-(target - static_cast<double>(base)), static_cast<std::uint32_t>(i));
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::uint64_t leftover = spec.total_population - assigned;
  for (std::size_t i = 0; leftover > 0 && i < remainders.size(); ++i, --leftover)
    population[passable_cells[remainders[i].second]] += 1;
  if (leftover > 0) throw MapError("population apportionment failed");

  Cell origin{};
  if (spec.origin)
    origin = *spec.origin;
  else if (spec.placement == Placement::Hotspot && passable[static_cast<std::size_t>(center.y) * spec.width + center.x])
    origin = center;
  else
    origin = Cell{static_cast<std::int32_t>(passable_cells.front() % spec.width),
                  static_cast<std::int32_t>(passable_cells.front() / spec.width)};

  return GridWorld(spec.width, spec.height, std::move(passable), std::move(population),
                   std::move(quarantine), origin);
}

}  // namespace zsim
