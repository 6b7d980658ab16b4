#pragma once

#include <functional>

#include "cornerfem/fields.hpp"
#include "cornerfem/mesh.hpp"
#include "cornerfem/sparse.hpp"

namespace cornerfem {

using BoundaryFn = std::function<double(Vec2)>;

// Quadrature used for boundary moments (u, hat)_Gamma. Edges ending at the
// corner are split geometrically toward it so data as rough as r^(-1/2+eps)
// integrates to ~1e-10 relative; the innermost piece is integrated under the
// substitution t = s^4 which removes the singularity.
struct BoundaryQuadrature {
	int gauss = 16;
	double ratio = 0.25;
	int levels = 24;
};

// 1D P1 mass matrix on the boundary chain (cyclic tridiagonal, SPD).
SparseMatrix boundary_mass(const Mesh& m);

// per-vertex moments b_x = (u, hat_x)_Gamma in boundary_loop order
std::vector<double> boundary_moments(const Mesh& m, const BoundaryFn& u,
                                     const BoundaryQuadrature& q = {});

// L2(Gamma) projection: solves M_Gamma c = b directly (cyclic Thomas).
TraceField l2_project_trace(const Mesh& m, const BoundaryFn& u, const BoundaryQuadrature& q = {});

// Carstensen interpolant: c_x = (u, hat_x)_Gamma / (1, hat_x)_Gamma with both
// moments from the same rule, making each coefficient a convex combination of
// sampled values (range preservation is exact).
TraceField carstensen_trace(const Mesh& m, const BoundaryFn& u, const BoundaryQuadrature& q = {});

// |u_h|_{L2(Gamma)} of a trace field
double trace_l2_norm(const Mesh& m, const TraceField& trace);

// trace sampled at boundary vertices (u must be evaluable there)
TraceField trace_from_function(const Mesh& m, const BoundaryFn& u);

} // namespace cornerfem
