#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "exkin/chains.hpp"
#include "exkin/kinetic.hpp"
#include "exkin/measures.hpp"
#include "exkin/stats.hpp"

namespace exkin {

// Flat `key=value` configuration with `#` comments and blank lines.
// Later keys overwrite earlier ones; surrounding whitespace is trimmed.
using FlatConfig = std::map<std::string, std::string>;

FlatConfig parse_flat_config(std::istream& in);
FlatConfig read_flat_config(const std::filesystem::path& path);

// Writers create missing parent directories and throw std::runtime_error on
// I/O failure. Numbers go through format_double for byte-stable output.
void write_events_csv(const std::filesystem::path& path, const TrajectoryRecord& traj);
void write_snapshots_csv(const std::filesystem::path& path, std::span<const Snapshot> snapshots);
void write_martingale_csv(const std::filesystem::path& path, const MartingalePath& path_values);
void write_density_csv(const std::filesystem::path& path, const GriddedDensity& f);
void write_values_csv(const std::filesystem::path& path, std::span<const double> values);
void write_matrix_csv(const std::filesystem::path& path, const TransitionMatrix& matrix);
void write_state_legend_csv(const std::filesystem::path& path, const TransitionMatrix& matrix);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace exkin
