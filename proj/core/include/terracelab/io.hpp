#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "terracelab/front_analysis.hpp"
#include "terracelab/terrace.hpp"

namespace terracelab {

// All CSV output is RFC-4180: CRLF records, '.' decimal separator, doubles
// printed with %.17g so that re-runs are byte-identical.

std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

std::string field_to_csv(const Field& f);                       // x,u
std::string level_track_to_csv(const LevelTrack& t, double T);  // k,t,a_k
std::string zero_number_to_csv(const ZeroNumberSeries& z);      // t,Z
std::string shift_track_to_csv(const ShiftTrack& s);            // t,eta

std::string level_track_to_json(const LevelTrack& t, double T);
std::string limit_profile_to_json(const LimitProfile& lp);
std::string terrace_to_json(const Terrace& t,
                            const std::vector<std::string>& profile_refs);

/// Writes one CSV per snapshot plus an index JSON; returns the file names
/// (relative to dir).
std::vector<std::string> write_trajectory_csv(const Trajectory& traj,
                                              const std::filesystem::path& dir,
                                              const std::string& stem);

// Columnar dump, little-endian:
//   bytes 0..3   magic "TRL1"
//   bytes 4..11  u64 n_x
//   bytes 12..19 u64 n_snapshots
//   then f64 xmin, f64 dx of the first snapshot,
//   then per snapshot: f64 t, n_x * f64 values.
void write_trajectory_columnar(const Trajectory& traj,
                               const std::filesystem::path& path);
Trajectory read_trajectory_columnar(const std::filesystem::path& path);

void write_wave_profile_columnar(const WaveProfile& w,
                                 const std::filesystem::path& path);

}  // namespace terracelab
