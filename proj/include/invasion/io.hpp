/// @file io.hpp
/// @brief Configuration files, snapshot files and CSV exports.
///
/// Snapshot file (one per time and component), little-endian:
///
///   offset  size  field
///   0       8     magic "INVSNAP\0"
///   8       4     uint32 version (= 1)
///   12      4     uint32 nx
///   16      4     uint32 ny
///   20      4     uint32 reserved (= 0)
///   24      8     float64 a
///   32      8     float64 b
///   40      8     float64 t
///   48      8*nx*ny float64 payload, row-major (x1 fastest)
#pragma once

#include "invasion/experiment.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace invasion {

inline constexpr char kSnapshotMagic[8] = {'I', 'N', 'V', 'S', 'N', 'A', 'P', '\0'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotFile {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  double a = 0.0;
  double b = 0.0;
  double t = 0.0;
  std::vector<double> values;
};

void write_snapshot(const std::filesystem::path& path, const GridSpec& grid, double t,
                    std::span<const double> values);
/// Throws IoError on a short file, bad magic or unsupported version.
SnapshotFile read_snapshot(const std::filesystem::path& path);

/// Parses a JSON configuration. Unknown keys are rejected; missing keys keep
/// the defaults of the named experiment preset.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Writes the snapshots, radial cuts, per-step report and front metrics of a
/// run into `dir` (created if needed).
void write_run(const std::filesystem::path& dir, const ExperimentConfig& cfg, const RunResult& run);

/// A run directory read back: snapshot times and full states.
struct StoredRun {
  GridSpec grid;
  std::vector<Snapshot> snapshots;
};
StoredRun read_run(const std::filesystem::path& dir);

void write_state_csv(const std::filesystem::path& path, const GridSpec& grid, const StateField& w);
void write_radial_cut_csv(const std::filesystem::path& path, const std::vector<RadialCutRow>& cut);
void write_report_csv(const std::filesystem::path& path, const RunReport& report);
void write_eoc_csv(const std::filesystem::path& path, const EocStudy& study);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

/// Parses "start:stop:step" (inclusive stop) or a comma separated list.
std::vector<double> parse_range(const std::string& spec);
std::vector<std::size_t> parse_levels(const std::string& spec);

}  // namespace invasion
