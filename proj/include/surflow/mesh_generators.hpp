#pragma once

#include <surflow/mesh.hpp>

namespace surflow {

/// Intrinsic flat torus R^2 / (Lx Z x Ly Z) on an nx x ny grid, each cell split
/// along its (i,j)-(i+1,j+1) diagonal. Carries a FlatChart for sampling analytic fields.
SurfaceMesh generate_flat_torus(Index nx, Index ny, double Lx, double Ly);

/// Embedded closed genus-2 surface: two tori with one 2x2 cell patch removed
/// each, bridged along the resulting boundary loops, then `subdivision` rounds
/// of Loop refinement.
SurfaceMesh generate_genus2(int subdivision);

/// One round of Loop subdivision on an embedded closed mesh.
SurfaceMesh loop_subdivide(const SurfaceMesh& mesh);

/// Regular tetrahedron (sphere topology).
SurfaceMesh generate_tetrahedron();

/// Subdivided icosahedron projected to the unit sphere (sphere topology).
SurfaceMesh generate_sphere(int subdivision);

} // namespace surflow
