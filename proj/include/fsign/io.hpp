#pragma once

#include <string>
#include <vector>

#include "fsign/hilbert.hpp"

// Sample and matrix I/O. Samples are CSV with one observation per row, one
// grid point per column, no header. Next to each sample CSV a JSON sidecar
// <stem>.grid.json records {"m": ..., "rule": "equidistant"}.

namespace fsign::io {

/// Read an n x m sample; the grid is equidistant with m points (validated
/// against the sidecar when one exists). Throws InvalidArgument on ragged
/// rows, unparsable numbers, or sidecar mismatch.
std::vector<Curve> read_sample_csv(const std::string& path);

/// Write curves as CSV plus the grid sidecar.
void write_sample_csv(const std::string& path, const std::vector<Curve>& sample);

/// Single curve convenience wrappers (one-row CSV).
Curve read_curve_csv(const std::string& path);
void write_curve_csv(const std::string& path, const Curve& curve);

/// Raw matrix CSV (used for operator kernels and eigenfunction stacks).
void write_matrix_csv(const std::string& path, const std::vector<double>& data,
                      std::size_t rows, std::size_t cols);
std::vector<std::vector<double>> read_matrix_csv(const std::string& path);

std::string sidecar_path(const std::string& csv_path);

/// Round-trip-exact decimal rendering (%.17g), shared by all CSV writers.
std::string format_full(double v);

}  // namespace fsign::io
