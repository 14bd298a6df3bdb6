#pragma once

#include <surflow/cochain.hpp>
#include <surflow/dynamics.hpp>

#include <string>

namespace surflow {

/// Writes raw little-endian float64 values to `path` and a JSON sidecar
/// {"degree", "cells", "format"} next to it (same stem, .json).
void save_cochain(const Cochain& cochain, const std::string& path);
/// Reads a cochain written by save_cochain; the sidecar must be present.
Cochain load_cochain(const std::string& path);
std::string cochain_sidecar_path(const std::string& path);

/// Matrix Market coordinate format.
void save_matrix_market(const SparseMatrix& matrix, const std::string& path);

/// Columns t, energy, enstrophy, total_vorticity, c_1 .. c_n.
void write_trajectory_csv(const Trajectory& trajectory, const std::string& path);

} // namespace surflow
