#pragma once

#include <vector>

#include "cornerfem/mesh.hpp"

namespace cornerfem {

// P1 coefficient vector, one value per mesh vertex.
struct NodalField {
	const Mesh* mesh = nullptr;
	std::vector<double> values;
};

NodalField zero_field(const Mesh& m);

// Coefficients of a piecewise linear function on the boundary, indexed by
// position in mesh.boundary_loop.
struct TraceField {
	const Mesh* mesh = nullptr;
	std::vector<double> values;
};

} // namespace cornerfem
