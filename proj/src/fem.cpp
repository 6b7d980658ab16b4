#include "cornerfem/fem.hpp"

#include "cornerfem/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cornerfem {

namespace {

// triangles processed per parallel chunk; bounds slot memory for huge meshes
constexpr int kChunk = 65536;

SparseMatrix vertex_pattern(const Mesh& m) {
	const int n = m.vertex_count();
	std::vector<std::vector<int>> nb(n);
	for (const auto& t : m.triangles)
		for (int a = 0; a < 3; ++a)
			for (int b = 0; b < 3; ++b)
				if (a != b)
					nb[t.v[a]].push_back(t.v[b]);
	SparseMatrix A;
	A.n = n;
	A.row_ptr.assign(n + 1, 0);
	for (int i = 0; i < n; ++i) {
		auto& row = nb[i];
		row.push_back(i);
		std::sort(row.begin(), row.end());
		row.erase(std::unique(row.begin(), row.end()), row.end());
		A.row_ptr[i + 1] = A.row_ptr[i] + static_cast<int>(row.size());
	}
	A.col.reserve(A.row_ptr[n]);
	for (int i = 0; i < n; ++i)
		A.col.insert(A.col.end(), nb[i].begin(), nb[i].end());
	A.val.assign(A.row_ptr[n], 0.0);
	return A;
}

void require_valid(int t, double twoA, const char* who) {
	if (!(twoA > 0.0) || !std::isfinite(twoA))
		throw std::runtime_error(std::string(who) + ": degenerate triangle " + std::to_string(t));
}

void element_stiffness(const Mesh& m, int t, double out[9]) {
	const Tri& T = m.triangles[t];
	const Vec2 p0 = m.vertices[T.v[0]];
	const Vec2 p1 = m.vertices[T.v[1]];
	const Vec2 p2 = m.vertices[T.v[2]];
	const double twoA = cross(p1 - p0, p2 - p0);
	require_valid(t, twoA, "assemble_stiffness");
	// d[i] = 2A * grad(lambda_i); K_ij = dot(d_i, d_j) / (4A)
	const Vec2 d[3] = {{p1.y - p2.y, p2.x - p1.x},
	                   {p2.y - p0.y, p0.x - p2.x},
	                   {p0.y - p1.y, p1.x - p0.x}};
	const double s = 1.0 / (2.0 * twoA);
	for (int a = 0; a < 3; ++a)
		for (int b = 0; b < 3; ++b)
			out[3 * a + b] = s * dot(d[a], d[b]);
}

void element_mass(const Mesh& m, int t, double out[9]) {
	const Tri& T = m.triangles[t];
	const Vec2 p0 = m.vertices[T.v[0]];
	const Vec2 p1 = m.vertices[T.v[1]];
	const Vec2 p2 = m.vertices[T.v[2]];
	const double twoA = cross(p1 - p0, p2 - p0);
	require_valid(t, twoA, "assemble_mass");
	const double off = twoA / 24.0;
	for (int a = 0; a < 3; ++a)
		for (int b = 0; b < 3; ++b)
			out[3 * a + b] = (a == b) ? 2.0 * off : off;
}

using ElementKernel = void (*)(const Mesh&, int, double[9]);

// Element matrices for a chunk of triangles are computed in parallel into
// disjoint slots, then scattered serially in triangle order, so the result is
// identical for every thread count and matches the reference loop bitwise.
SparseMatrix assemble(const Mesh& m, ElementKernel kernel) {
	SparseMatrix A = vertex_pattern(m);
	const int nt = m.triangle_count();
	std::vector<double> slots(static_cast<std::size_t>(std::min(nt, kChunk)) * 9);
	for (int lo = 0; lo < nt; lo += kChunk) {
		const int hi = std::min(nt, lo + kChunk);
		par::for_each(hi - lo, [&](std::ptrdiff_t i) {
			kernel(m, lo + static_cast<int>(i), &slots[9 * i]);
		});
		for (int t = lo; t < hi; ++t) {
			const double* e = &slots[9 * static_cast<std::size_t>(t - lo)];
			const Tri& T = m.triangles[t];
			for (int a = 0; a < 3; ++a)
				for (int b = 0; b < 3; ++b)
					A.add(T.v[a], T.v[b], e[3 * a + b]);
		}
	}
	return A;
}

SparseMatrix assemble_serial(const Mesh& m, ElementKernel kernel) {
	SparseMatrix A = vertex_pattern(m);
	double e[9];
	for (int t = 0; t < m.triangle_count(); ++t) {
		kernel(m, t, e);
		const Tri& T = m.triangles[t];
		for (int a = 0; a < 3; ++a)
			for (int b = 0; b < 3; ++b)
				A.add(T.v[a], T.v[b], e[3 * a + b]);
	}
	return A;
}

} // namespace

std::vector<int> interior_vertices(const Mesh& m) {
	std::vector<int> idx;
	for (int i = 0; i < m.vertex_count(); ++i)
		if (!m.on_boundary[i])
			idx.push_back(i);
	return idx;
}

SparseMatrix assemble_stiffness(const Mesh& m) { return assemble(m, element_stiffness); }
SparseMatrix assemble_mass(const Mesh& m) { return assemble(m, element_mass); }

namespace reference {
SparseMatrix assemble_stiffness(const Mesh& m) {
	return assemble_serial(m, element_stiffness);
}
SparseMatrix assemble_mass(const Mesh& m) { return assemble_serial(m, element_mass); }
} // namespace reference

std::vector<double> load_vector(const Mesh& m, const ScalarFn& f) {
	const int nt = m.triangle_count();
	std::vector<double> rhs(m.vertex_count(), 0.0);
	std::vector<double> slots(static_cast<std::size_t>(std::min(nt, kChunk)) * 3);
	for (int lo = 0; lo < nt; lo += kChunk) {
		const int hi = std::min(nt, lo + kChunk);
		par::for_each(hi - lo, [&](std::ptrdiff_t i) {
			const int t = lo + static_cast<int>(i);
			const Tri& T = m.triangles[t];
			const Vec2 p[3] = {m.vertices[T.v[0]], m.vertices[T.v[1]], m.vertices[T.v[2]]};
			const double area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
			// edge-midpoint rule is exact to degree 2; hats are 1/2 at the
			// two midpoints adjacent to their vertex
			const double fm[3] = {f(midpoint(p[0], p[1])), f(midpoint(p[1], p[2])),
			                      f(midpoint(p[2], p[0]))};
			double* s = &slots[3 * i];
			s[0] = area / 3.0 * 0.5 * (fm[0] + fm[2]);
			s[1] = area / 3.0 * 0.5 * (fm[0] + fm[1]);
			s[2] = area / 3.0 * 0.5 * (fm[1] + fm[2]);
		});
		for (int t = lo; t < hi; ++t) {
			const Tri& T = m.triangles[t];
			for (int a = 0; a < 3; ++a)
				rhs[T.v[a]] += slots[3 * static_cast<std::size_t>(t - lo) + a];
		}
	}
	return rhs;
}

NodalField zero_field(const Mesh& m) {
	return {&m, std::vector<double>(m.vertex_count(), 0.0)};
}

NodalField lifting(const Mesh& m, const TraceField& trace) {
	if (trace.values.size() != m.boundary_loop.size())
		throw std::invalid_argument("lifting: trace length does not match boundary loop");
	NodalField g = zero_field(m);
	for (std::size_t p = 0; p < m.boundary_loop.size(); ++p)
		g.values[m.boundary_loop[p]] = trace.values[p];
	return g;
}

NodalField solve_poisson_dirichlet(const Mesh& m, const ScalarFn& f, const TraceField& trace,
                                   double tol) {
	NodalField y = lifting(m, trace);
	const SparseMatrix A = assemble_stiffness(m);
	const std::vector<int> interior = interior_vertices(m);
	if (interior.empty())
		return y;

	const std::vector<double> Ag = matvec(A, y.values);
	std::vector<double> rhs_full;
	if (f)
		rhs_full = load_vector(m, f);
	std::vector<double> rhs(interior.size());
	for (std::size_t k = 0; k < interior.size(); ++k) {
		const int i = interior[k];
		rhs[k] = (f ? rhs_full[i] : 0.0) - Ag[i];
	}

	const SparseMatrix Aii = restrict_to(A, interior);
	const CgResult sol = cg_solve(Aii, rhs, tol);
	if (!sol.converged)
		throw std::runtime_error("solve_poisson_dirichlet: cg stalled at relative residual " +
		                         std::to_string(sol.relative_residual));
	for (std::size_t k = 0; k < interior.size(); ++k)
		y.values[interior[k]] += sol.x[k];
	return y;
}

} // namespace cornerfem
