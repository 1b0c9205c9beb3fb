#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "larche/phasefield.hpp"

namespace larche::io {

struct FieldMeta {
  int nx = 0, ny = 0;
  double Lx = 0.0, Ly = 0.0;
  double time = 0.0;
  std::string field;
};

/// Writes stem.f64 (little-endian doubles, row-major, x fastest) and the
/// stem.json sidecar {nx, ny, Lx, Ly, time, field}.
void write_field(const Field& f, const std::filesystem::path& stem, double time, const std::string& name);

/// Reads a field written by write_field. Throws std::runtime_error on missing
/// files, malformed sidecars or a size mismatch.
Field read_field(const std::filesystem::path& stem, FieldMeta* meta = nullptr);

/// CSV with header t,mass,E1,E2,Etot,max_abs_c.
void write_time_series(const Trajectory& tr, const std::filesystem::path& path);

/// Trajectory directory: timeseries.csv, frames.json (index of sample times)
/// and frames/NNNN_{c,mu}.{f64,json}; contours as frames/NNNN_contour.csv
/// when present.
void write_trajectory(const Trajectory& tr, const std::filesystem::path& dir);

struct FrameDiff {
  int frame = 0;
  double time = 0.0;
  std::string field;
  double l2 = 0.0, l3 = 0.0, max = 0.0;
};

/// Per-frame trapezoid L2, L3 and max norms of a - b for every field. Throws
/// std::runtime_error if the frame lists, sample times or grids differ.
std::vector<FrameDiff> compare_runs(const std::filesystem::path& a, const std::filesystem::path& b);

void write_csv(const std::vector<FrameDiff>& d, const std::filesystem::path& path);

}  // namespace larche::io
