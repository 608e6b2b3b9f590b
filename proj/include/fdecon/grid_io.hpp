#pragma once

#include <string>

#include "fdecon/spectra.hpp"

namespace fdecon {

// FDG1 binary layout: "FDG1", u64 M, u64 N, f64 sigma, then M*N f64 samples,
// all little-endian, row-major (profile-major).
// CSV layout: header line "M,N,sigma", then M lines of N comma-separated values.

void write_grid_fdg1(const ObservationGrid& grid, const std::string& path);
void write_grid_csv(const ObservationGrid& grid, const std::string& path);

/// Reads either format; FDG1 is recognised by its magic, anything else is
/// parsed as CSV.
ObservationGrid read_grid(const std::string& path);

/// Dispatches on extension: ".csv" writes CSV, everything else FDG1.
void write_grid(const ObservationGrid& grid, const std::string& path);

}  // namespace fdecon
