#include "risradar/gridio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "risradar/errors.hpp"

namespace risradar {

namespace {

constexpr char kMagic[4] = {'R', 'G', 'R', 'D'};
constexpr std::uint32_t kGridVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open for reading: " + path.string());
  return is;
}

// Shortest round-trip decimal representation.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_grid(const SymbolGrid& grid, const std::filesystem::path& path) {
  auto os = open_out(path);
  os.write(kMagic, 4);
  write_pod(os, kGridVersion);
  write_pod(os, static_cast<std::uint32_t>(grid.n_subcarriers));
  write_pod(os, static_cast<std::uint32_t>(grid.n_slots));
  write_pod(os, static_cast<std::uint64_t>(grid.seed));
  write_pod(os, grid.slot_period_s);
  for (int n = 0; n < grid.n_subcarriers; ++n) {
    for (int m = 0; m < grid.n_slots; ++m) {
      write_pod(os, grid.data(n, m).real());
      write_pod(os, grid.data(n, m).imag());
    }
  }
  if (!os) throw DataError("write failed: " + path.string());
}

SymbolGrid read_grid(const std::filesystem::path& path) {
  auto is = open_in(path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a grid file: " + path.string());
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kGridVersion)
    throw DataError("unsupported grid version " + std::to_string(version));
  SymbolGrid grid;
  grid.n_subcarriers = static_cast<int>(read_pod<std::uint32_t>(is));
  grid.n_slots = static_cast<int>(read_pod<std::uint32_t>(is));
  grid.seed = read_pod<std::uint64_t>(is);
  grid.slot_period_s = read_pod<double>(is);
  if (grid.n_subcarriers <= 0 || grid.n_slots <= 0 || grid.n_subcarriers > (1 << 20) ||
      grid.n_slots > (1 << 20))
    throw DataError("grid header dimensions out of range: " + path.string());
  grid.data = CMatrix(grid.n_subcarriers, grid.n_slots);
  for (int n = 0; n < grid.n_subcarriers; ++n) {
    for (int m = 0; m < grid.n_slots; ++m) {
      const double re = read_pod<double>(is);
      const double im = read_pod<double>(is);
      grid.data(n, m) = {re, im};
    }
  }
  if (!is) throw DataError("truncated grid file: " + path.string());
  return grid;
}

void write_ris_csv(const RisConfig& ris, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "element,slot,phase_rad,amplitude\n";
  for (int l = 0; l < ris.n_elements(); ++l)
    for (int m = 0; m < ris.n_slots(); ++m) {
      // Fold the slot sign into the phase so the file alone reconstructs C.
      const double phase = ris.phase(l, m) + (ris.sign(m) < 0 ? M_PI : 0.0);
      os << l << ',' << m << ',' << fmt(phase) << ',' << fmt(ris.amplitude(l, m)) << '\n';
    }
  if (!os) throw DataError("write failed: " + path.string());
}

RisConfig read_ris_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("element,slot,phase_rad,amplitude", 0) != 0)
    throw DataError("bad ris csv header: " + path.string());

  struct Entry {
    int l, m;
    double phase, amp;
  };
  std::vector<Entry> entries;
  int max_l = -1, max_m = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Entry e{};
    char c1, c2, c3;
    std::istringstream ss(line);
    if (!(ss >> e.l >> c1 >> e.m >> c2 >> e.phase >> c3 >> e.amp) || c1 != ',' || c2 != ',' ||
        c3 != ',')
      throw DataError("bad ris csv row: " + line);
    entries.push_back(e);
    max_l = std::max(max_l, e.l);
    max_m = std::max(max_m, e.m);
  }
  const int n_elements = max_l + 1;
  const int n_slots = max_m + 1;
  if (n_elements <= 0 || n_slots <= 0 || n_slots % 2 != 0)
    throw DataError("ris csv: invalid dimensions");
  if (entries.size() != static_cast<size_t>(n_elements) * n_slots)
    throw DataError("ris csv: missing entries");

  // Reconstruct effective (even-slot) weights; the sign convention of
  // from_effective_weights regenerates the odd slots.
  CMatrix eff(n_elements, n_slots / 2);
  for (const Entry& e : entries)
    if (e.m % 2 == 0) eff(e.l, e.m / 2) = std::polar(e.amp, e.phase);
  return RisConfig::from_effective_weights(eff, n_slots);
}

void write_spectrum_csv(const std::vector<MusicResult>& results,
                        const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "angle_deg,power_db,subcarrier_index\n";
  for (const MusicResult& r : results)
    for (const SpectrumPoint& p : r.spectrum)
      os << fmt(p.angle_deg) << ',' << fmt(10.0 * std::log10(std::max(p.power, 1e-300))) << ','
         << r.subcarrier << '\n';
  if (!os) throw DataError("write failed: " + path.string());
}

void write_pattern_csv(const std::vector<SpectrumPoint>& pattern,
                       const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "angle_deg,gain_db\n";
  for (const SpectrumPoint& p : pattern) os << fmt(p.angle_deg) << ',' << fmt(p.power) << '\n';
  if (!os) throw DataError("write failed: " + path.string());
}

void write_map_csv(const RangeDopplerMap& map, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "range_bin,doppler_bin,range_m,velocity_mps,power_db\n";
  for (int r = 0; r < map.n_range_bins; ++r) {
    for (int v = 0; v < map.n_doppler_bins; ++v) {
      const double vel =
          (v > map.n_doppler_bins / 2 ? v - map.n_doppler_bins : v) * map.velocity_bin_mps;
      os << r << ',' << v << ',' << fmt(r * map.range_bin_m) << ',' << fmt(vel) << ','
         << fmt(10.0 * std::log10(std::max(std::norm(map.map(r, v)), 1e-300))) << '\n';
    }
  }
  if (!os) throw DataError("write failed: " + path.string());
}

namespace {
constexpr char kMapMagic[4] = {'R', 'M', 'A', 'P'};
constexpr std::uint32_t kMapVersion = 1;
}  // namespace

void write_map(const RangeDopplerMap& map, const std::filesystem::path& path) {
  auto os = open_out(path);
  os.write(kMapMagic, 4);
  write_pod(os, kMapVersion);
  write_pod(os, static_cast<std::uint32_t>(map.n_range_bins));
  write_pod(os, static_cast<std::uint32_t>(map.n_doppler_bins));
  write_pod(os, map.range_bin_m);
  write_pod(os, map.velocity_bin_mps);
  write_pod(os, map.unambiguous_range_m);
  write_pod(os, map.true_range_m.value_or(-1.0));
  for (int r = 0; r < map.n_range_bins; ++r)
    for (int v = 0; v < map.n_doppler_bins; ++v) {
      write_pod(os, map.map(r, v).real());
      write_pod(os, map.map(r, v).imag());
    }
  if (!os) throw DataError("write failed: " + path.string());
}

RangeDopplerMap read_map(const std::filesystem::path& path) {
  auto is = open_in(path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMapMagic, 4) != 0)
    throw DataError("not a map file: " + path.string());
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kMapVersion)
    throw DataError("unsupported map version " + std::to_string(version));
  RangeDopplerMap map;
  map.n_range_bins = static_cast<int>(read_pod<std::uint32_t>(is));
  map.n_doppler_bins = static_cast<int>(read_pod<std::uint32_t>(is));
  map.range_bin_m = read_pod<double>(is);
  map.velocity_bin_mps = read_pod<double>(is);
  map.unambiguous_range_m = read_pod<double>(is);
  const double true_range = read_pod<double>(is);
  if (true_range >= 0.0) map.true_range_m = true_range;
  if (map.n_range_bins <= 0 || map.n_doppler_bins <= 0 || map.n_range_bins > (1 << 20) ||
      map.n_doppler_bins > (1 << 20))
    throw DataError("map header dimensions out of range: " + path.string());
  map.map = CMatrix(map.n_range_bins, map.n_doppler_bins);
  for (int r = 0; r < map.n_range_bins; ++r)
    for (int v = 0; v < map.n_doppler_bins; ++v) {
      const double re = read_pod<double>(is);
      const double im = read_pod<double>(is);
      map.map(r, v) = {re, im};
    }
  if (!is) throw DataError("truncated map file: " + path.string());
  return map;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "inr_ratio,stage,mean_error_m,std_error_m,detection_rate,trials\n";
  for (const SweepRow& r : rows)
    os << fmt(r.inr_ratio) << ',' << to_string(r.stage) << ',' << fmt(r.mean_error_m) << ','
       << fmt(r.std_error_m) << ',' << fmt(r.detection_rate) << ',' << r.n_trials << '\n';
  if (!os) throw DataError("write failed: " + path.string());
}

}  // namespace risradar
