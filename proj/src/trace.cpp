#include "cornerfem/trace.hpp"

#include "cornerfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace cornerfem {

namespace {

void validate(const BoundaryQuadrature& q) {
	if (q.gauss < 2 || q.gauss > 64)
		throw std::invalid_argument("boundary quadrature: gauss order out of range");
	if (!(q.ratio > 0.0) || !(q.ratio < 1.0))
		throw std::invalid_argument("boundary quadrature: ratio must lie in (0, 1)");
	if (q.levels < 2)
		throw std::invalid_argument("boundary quadrature: need at least 2 levels");
}

struct EdgeMoments {
	double at_a = 0.0;
	double at_b = 0.0;
};

// adds \int over [lo,hi] (edge parameter) of u * {1-s, s} * L ds
void add_piece(EdgeMoments& em, Vec2 A, Vec2 B, double L, double lo, double hi,
               const GaussRule1d& g, const BoundaryFn& u) {
	const double mid = 0.5 * (lo + hi);
	const double half = 0.5 * (hi - lo);
	for (std::size_t i = 0; i < g.nodes.size(); ++i) {
		const double s = mid + half * g.nodes[i];
		const double w = half * g.weights[i] * L;
		const double val = u(A + s * (B - A));
		em.at_a += w * (1.0 - s) * val;
		em.at_b += w * s * val;
	}
}

EdgeMoments edge_moments(Vec2 A, Vec2 B, bool corner_at_a, bool corner_at_b,
                         const BoundaryQuadrature& q, const BoundaryFn& u) {
	if (corner_at_b) {
		const EdgeMoments r = edge_moments(B, A, true, false, q, u);
		return {r.at_b, r.at_a};
	}
	const GaussRule1d& g = gauss_legendre(q.gauss);
	const double L = norm(B - A);
	EdgeMoments em;
	if (!corner_at_a) {
		add_piece(em, A, B, L, 0.0, 1.0, g, u);
		return em;
	}
	// geometric pieces toward the corner at s = 0
	double hi = 1.0;
	for (int j = 1; j < q.levels; ++j) {
		const double lo = std::pow(q.ratio, j);
		add_piece(em, A, B, L, lo, hi, g, u);
		hi = lo;
	}
	// innermost piece under s = hi * t^4: data like s^(-1/2+eps) becomes
	// t^(1+4*eps), which Gauss integrates to near machine precision
	const double eps = hi;
	for (std::size_t i = 0; i < g.nodes.size(); ++i) {
		const double t = 0.5 + 0.5 * g.nodes[i];
		const double s = eps * t * t * t * t;
		const double w = 0.5 * g.weights[i] * eps * 4.0 * t * t * t * L;
		const double val = u(A + s * (B - A));
		em.at_a += w * (1.0 - s) * val;
		em.at_b += w * s * val;
	}
	return em;
}

// consecutive edge lengths along the boundary loop
std::vector<double> loop_lengths(const Mesh& m) {
	const int n = static_cast<int>(m.boundary_loop.size());
	std::vector<double> L(n);
	for (int p = 0; p < n; ++p)
		L[p] = norm(m.vertices[m.boundary_loop[(p + 1) % n]] -
		            m.vertices[m.boundary_loop[p]]);
	return L;
}

void require_loop(const Mesh& m) {
	if (m.boundary_loop.size() < 3)
		throw std::invalid_argument("boundary operations need a closed loop of >= 3 vertices");
}

// Solves T x = b for the cyclic SPD tridiagonal with diagonal d and
// off-diagonal e (e[p] couples p and p+1, e[n-1] wraps around) by the
// Sherman-Morrison rank-one correction of an open tridiagonal solve.
std::vector<double> cyclic_thomas(std::vector<double> d, const std::vector<double>& e,
                                  std::vector<double> b) {
	const int n = static_cast<int>(d.size());
	const double gamma = -d[0];
	const double wrap = e[n - 1];
	std::vector<double> d2 = std::move(d);
	d2[0] -= gamma;
	d2[n - 1] -= wrap * wrap / gamma;

	auto thomas = [&](std::vector<double> rhs) {
		std::vector<double> c(n, 0.0);
		std::vector<double> diag = d2;
		for (int i = 1; i < n; ++i) {
			const double w = e[i - 1] / diag[i - 1];
			diag[i] -= w * e[i - 1];
			rhs[i] -= w * rhs[i - 1];
		}
		c[n - 1] = rhs[n - 1] / diag[n - 1];
		for (int i = n - 2; i >= 0; --i)
			c[i] = (rhs[i] - e[i] * c[i + 1]) / diag[i];
		return c;
	};

	std::vector<double> uvec(n, 0.0);
	uvec[0] = gamma;
	uvec[n - 1] = wrap;
	const std::vector<double> y = thomas(std::move(b));
	const std::vector<double> z = thomas(std::move(uvec));
	const double vy = y[0] + (wrap / gamma) * y[n - 1];
	const double vz = z[0] + (wrap / gamma) * z[n - 1];
	const double factor = vy / (1.0 + vz);
	std::vector<double> x(n);
	for (int i = 0; i < n; ++i)
		x[i] = y[i] - factor * z[i];
	return x;
}

} // namespace

SparseMatrix boundary_mass(const Mesh& m) {
	require_loop(m);
	const int n = static_cast<int>(m.boundary_loop.size());
	const std::vector<double> L = loop_lengths(m);

	SparseMatrix M;
	M.n = n;
	M.row_ptr.assign(n + 1, 0);
	for (int p = 0; p < n; ++p)
		M.row_ptr[p + 1] = M.row_ptr[p] + 3;
	M.col.resize(3 * n);
	M.val.assign(3 * n, 0.0);
	for (int p = 0; p < n; ++p) {
		int cols[3] = {(p + n - 1) % n, p, (p + 1) % n};
		std::sort(std::begin(cols), std::end(cols));
		for (int k = 0; k < 3; ++k)
			M.col[M.row_ptr[p] + k] = cols[k];
	}
	for (int p = 0; p < n; ++p) {
		const int pn = (p + 1) % n;
		M.add(p, p, L[p] / 3.0);
		M.add(pn, pn, L[p] / 3.0);
		M.add(p, pn, L[p] / 6.0);
		M.add(pn, p, L[p] / 6.0);
	}
	return M;
}

std::vector<double> boundary_moments(const Mesh& m, const BoundaryFn& u,
                                     const BoundaryQuadrature& q) {
	require_loop(m);
	validate(q);
	const int n = static_cast<int>(m.boundary_loop.size());
	std::vector<double> b(n, 0.0);
	for (int p = 0; p < n; ++p) {
		const int a = m.boundary_loop[p];
		const int c = m.boundary_loop[(p + 1) % n];
		const EdgeMoments em =
		    edge_moments(m.vertices[a], m.vertices[c], a == m.origin_vertex,
		                 c == m.origin_vertex, q, u);
		b[p] += em.at_a;
		b[(p + 1) % n] += em.at_b;
	}
	return b;
}

TraceField l2_project_trace(const Mesh& m, const BoundaryFn& u, const BoundaryQuadrature& q) {
	require_loop(m);
	validate(q);
	const int n = static_cast<int>(m.boundary_loop.size());
	const std::vector<double> L = loop_lengths(m);
	std::vector<double> d(n), e(n);
	for (int p = 0; p < n; ++p) {
		d[p] = (L[(p + n - 1) % n] + L[p]) / 3.0;
		e[p] = L[p] / 6.0;
	}
	TraceField field;
	field.mesh = &m;
	field.values = cyclic_thomas(std::move(d), e, boundary_moments(m, u, q));
	return field;
}

TraceField carstensen_trace(const Mesh& m, const BoundaryFn& u, const BoundaryQuadrature& q) {
	const std::vector<double> num = boundary_moments(m, u, q);
	const std::vector<double> den =
	    boundary_moments(m, [](Vec2) { return 1.0; }, q);
	TraceField field;
	field.mesh = &m;
	field.values.resize(num.size());
	for (std::size_t p = 0; p < num.size(); ++p)
		field.values[p] = num[p] / den[p];
	return field;
}

double trace_l2_norm(const Mesh& m, const TraceField& trace) {
	require_loop(m);
	const int n = static_cast<int>(m.boundary_loop.size());
	if (static_cast<int>(trace.values.size()) != n)
		throw std::invalid_argument("trace_l2_norm: trace length does not match boundary loop");
	const std::vector<double> L = loop_lengths(m);
	double s = 0.0;
	for (int p = 0; p < n; ++p) {
		const double ca = trace.values[p];
		const double cb = trace.values[(p + 1) % n];
		s += L[p] / 3.0 * (ca * ca + cb * cb + ca * cb);
	}
	return std::sqrt(s);
}

TraceField trace_from_function(const Mesh& m, const BoundaryFn& u) {
	require_loop(m);
	TraceField field;
	field.mesh = &m;
	field.values.resize(m.boundary_loop.size());
	for (std::size_t p = 0; p < m.boundary_loop.size(); ++p)
		field.values[p] = u(m.vertices[m.boundary_loop[p]]);
	return field;
}

} // namespace cornerfem
