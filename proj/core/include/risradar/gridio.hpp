#pragma once

/// File formats for fixtures and plot-ready exports.
///
/// Grid binary layout ("RGRD", little-endian):
///   magic[4] = 'R','G','R','D'
///   u32 version (1)
///   u32 n_subcarriers, u32 n_slots
///   u64 seed
///   f64 slot_period_s
///   n_subcarriers * n_slots complex samples, row-major (subcarrier-major),
///   each as f64 real, f64 imag.
///
/// CSV exports carry a header row naming every column's unit.

#include <filesystem>
#include <vector>

#include "risradar/doa.hpp"
#include "risradar/rvmap.hpp"
#include "risradar/waveform.hpp"

namespace risradar {

void write_grid(const SymbolGrid& grid, const std::filesystem::path& path);
SymbolGrid read_grid(const std::filesystem::path& path);

/// element,slot,phase_rad,amplitude rows covering the full frame.
void write_ris_csv(const RisConfig& ris, const std::filesystem::path& path);
RisConfig read_ris_csv(const std::filesystem::path& path);

/// angle_deg,power_db,subcarrier_index rows, one block per scanned spectrum.
void write_spectrum_csv(const std::vector<MusicResult>& results,
                        const std::filesystem::path& path);

/// angle_deg,gain_db rows.
void write_pattern_csv(const std::vector<SpectrumPoint>& pattern,
                       const std::filesystem::path& path);

/// range_bin,doppler_bin,range_m,velocity_mps,power_db rows.
void write_map_csv(const RangeDopplerMap& map, const std::filesystem::path& path);

/// Compact binary fixture ("RMAP": bin counts, axis scales, unambiguous
/// range, optional true range, complex cells row-major as f64 pairs).
void write_map(const RangeDopplerMap& map, const std::filesystem::path& path);
RangeDopplerMap read_map(const std::filesystem::path& path);

/// inr_ratio,stage,mean_error_m,std_error_m,detection_rate,trials rows.
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

}  // namespace risradar
