#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "cornerfem/geometry.hpp"

namespace cornerfem {

// Triangle with ccw vertex order. `nv` marks the newest vertex; the
// refinement edge is the edge opposite v[nv].
struct Tri {
	std::array<int, 3> v{};
	int nv = 0;
};

// Directed boundary edge a->b with the domain on its left, so `normal`
// points outward. `segment` identifies the maximal straight boundary run
// the edge belongs to.
struct BoundaryEdge {
	int a = 0;
	int b = 0;
	Vec2 normal{};
	int segment = 0;
};

struct BoundarySegment {
	Vec2 from{};
	Vec2 to{};
	Vec2 normal{};
};

// Conforming triangulation of the corner domain
//   Omega = (-1,1)^2 intersected with {0 <= theta <= omega},
// or of any other polygon when assembled through make_mesh. Meshes are
// immutable; refinement functions return new meshes.
struct Mesh {
	std::vector<Vec2> vertices;
	std::vector<Tri> triangles;
	std::vector<BoundaryEdge> boundary_edges;
	double omega = 0.0;

	// midpoint lineage: vertex i was created as the midpoint of
	// (parent_a[i], parent_b[i]); initial vertices point to themselves
	std::vector<int> parent_a;
	std::vector<int> parent_b;

	// derived by finalize()
	std::vector<char> on_boundary;
	std::vector<int> boundary_loop; // ccw vertex chain, starts at the corner vertex when present
	std::vector<int> loop_pos;      // vertex id -> position in boundary_loop, or -1
	std::vector<BoundarySegment> segments;
	int origin_vertex = -1; // vertex at (0,0), or -1

	int vertex_count() const { return static_cast<int>(vertices.size()); }
	int triangle_count() const { return static_cast<int>(triangles.size()); }
};

double triangle_area(const Mesh& m, int t);
double triangle_diameter(const Mesh& m, int t);
double mesh_area(const Mesh& m);
// largest triangle diameter
double mesh_h(const Mesh& m);

// Fans triangles from the origin to the square boundary points at multiples
// of 45 degrees clipped to omega. Throws unless omega is in (0, 2*pi).
Mesh build_initial_mesh(double omega);

// Builds a mesh from raw entities (tests, import). Computes derived data and
// validates basic consistency.
Mesh make_mesh(std::vector<Vec2> vertices, std::vector<Tri> triangles,
               std::vector<BoundaryEdge> boundary_edges, double omega);

// Newest-vertex bisection of the marked triangles plus the conformity
// closure. Unmarked triangles are split only as the closure requires.
Mesh bisect_marked(const Mesh& m, const std::vector<int>& marked);
Mesh bisect_all(const Mesh& m);

struct GradingParams {
	double mu = 1.0; // grading exponent in (0, 1]
	double h = 0.5;  // target global mesh parameter
	double c1 = 0.25;
	double c2 = 4.0;
};

struct GradingReport {
	bool pass = true;
	std::vector<int> violations;
};

// Checks c1*h^(1/mu) <= h_T <= c2*h^(1/mu) for triangles touching the corner
// and c1*h*r_T^(1-mu) <= h_T <= c2*h*r_T^(1-mu) otherwise, with r_T the
// smallest vertex radius.
GradingReport verify_grading(const Mesh& m, const GradingParams& p);

// Repeatedly bisects the triangles violating the upper grading bound until
// verify_grading passes. Throws if sweep_limit sweeps do not suffice.
Mesh refine_to_graded(const Mesh& m, const GradingParams& p, int sweep_limit = 200);

// Structural soundness: ccw orientation, conformity, boundary consistency.
// Throws with a description on the first violation. Test helper, O(N log N).
void check_mesh(const Mesh& m);

// Text format: header `vertices N triangles M boundary_edges K omega W`,
// then one line per entity; floats carry 17 significant digits.
void write_mesh(std::ostream& os, const Mesh& m);
Mesh read_mesh(std::istream& is);

} // namespace cornerfem
