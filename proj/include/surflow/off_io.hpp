#pragma once

#include <surflow/mesh.hpp>

#include <iosfwd>
#include <string>

namespace surflow {

/// Reads an ASCII OFF file with triangle faces only into an embedded mesh.
SurfaceMesh load_off(const std::string& path);
SurfaceMesh read_off(std::istream& in);

/// Writes an embedded mesh as ASCII OFF ("3 i j k" faces).
void save_off(const SurfaceMesh& mesh, const std::string& path);
void write_off(const SurfaceMesh& mesh, std::ostream& out);

} // namespace surflow
