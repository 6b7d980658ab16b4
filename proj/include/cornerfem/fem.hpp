#pragma once

#include <functional>

#include "cornerfem/fields.hpp"
#include "cornerfem/mesh.hpp"
#include "cornerfem/sparse.hpp"

namespace cornerfem {

using ScalarFn = std::function<double(Vec2)>;

std::vector<int> interior_vertices(const Mesh& m);

// P1 stiffness and mass matrices over all vertices. Throws on degenerate
// triangles, naming the triangle.
SparseMatrix assemble_stiffness(const Mesh& m);
SparseMatrix assemble_mass(const Mesh& m);

// load vector (f, v_h) by the 3-point edge-midpoint rule
std::vector<double> load_vector(const Mesh& m, const ScalarFn& f);

// Plain single-threaded element loops kept as the reference the parallel
// kernels are tested and benchmarked against.
namespace reference {
SparseMatrix assemble_stiffness(const Mesh& m);
SparseMatrix assemble_mass(const Mesh& m);
} // namespace reference

// Nodal field equal to the trace at boundary vertices and zero at interior
// vertices.
NodalField lifting(const Mesh& m, const TraceField& trace);

// Galerkin solution of -Laplace y = f with Dirichlet values given by `trace`,
// computed through homogenization: the lifting plus one interior solve whose
// load is (f, v) minus the stiffness image of the lifting. Pass f = nullptr
// for f = 0 (skips the load quadrature). Throws when CG fails to converge.
NodalField solve_poisson_dirichlet(const Mesh& m, const ScalarFn& f, const TraceField& trace,
                                   double tol = 1e-10);

} // namespace cornerfem
