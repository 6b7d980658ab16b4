#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cornerfem/fem.hpp"
#include "cornerfem/quadrature.hpp"
#include "cornerfem/trace.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace cornerfem;

namespace {

constexpr double kPi = std::numbers::pi;

Mesh unit_right_triangle() {
	std::vector<Vec2> verts = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
	std::vector<Tri> tris = {{{0, 1, 2}, 0}};
	const double inv = 1.0 / std::sqrt(2.0);
	std::vector<BoundaryEdge> edges = {
	    {0, 1, {0.0, -1.0}, 0}, {1, 2, {inv, inv}, 1}, {2, 0, {-1.0, 0.0}, 2}};
	return make_mesh(verts, tris, edges, kPi / 2.0);
}

Mesh unit_square_two_triangles() {
	std::vector<Vec2> verts = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
	std::vector<Tri> tris = {{{0, 1, 2}, 1}, {{0, 2, 3}, 2}};
	std::vector<BoundaryEdge> edges = {{0, 1, {0.0, -1.0}, 0},
	                                   {1, 2, {1.0, 0.0}, 1},
	                                   {2, 3, {0.0, 1.0}, 2},
	                                   {3, 0, {-1.0, 0.0}, 3}};
	return make_mesh(verts, tris, edges, kPi / 2.0);
}

double fem_l2_error(const Mesh& m, const std::vector<double>& vals,
                    const std::function<double(Vec2)>& exact) {
	double acc = 0.0;
	for (int t = 0; t < m.triangle_count(); ++t) {
		const Tri& T = m.triangles[t];
		const Vec2 a = m.vertices[T.v[0]], b = m.vertices[T.v[1]], c = m.vertices[T.v[2]];
		const double area = 0.5 * cross(b - a, c - a);
		for (const oracle::TriPoint& q : oracle::tri7()) {
			const Vec2 p{q.b0 * a.x + q.b1 * b.x + q.b2 * c.x,
			             q.b0 * a.y + q.b1 * b.y + q.b2 * c.y};
			const double fem = q.b0 * vals[T.v[0]] + q.b1 * vals[T.v[1]] + q.b2 * vals[T.v[2]];
			const double d = fem - exact(p);
			acc += q.w * area * d * d;
		}
	}
	return std::sqrt(acc);
}

} // namespace

TEST_CASE("stiffness matrix of the unit right triangle") {
	const Mesh m = unit_right_triangle();
	const SparseMatrix A = assemble_stiffness(m);
	const double want[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
	for (int i = 0; i < 3; ++i)
		for (int j = 0; j < 3; ++j)
			CHECK(A.get(i, j) == doctest::Approx(want[i][j]).epsilon(1e-14));
}

TEST_CASE("mass matrix of the unit right triangle") {
	const Mesh m = unit_right_triangle();
	const SparseMatrix M = assemble_mass(m);
	for (int i = 0; i < 3; ++i)
		for (int j = 0; j < 3; ++j)
			CHECK(M.get(i, j) == doctest::Approx((i == j ? 2.0 : 1.0) / 24.0).epsilon(1e-14));
}

TEST_CASE("assembled stiffness of the two-triangle square") {
	const Mesh m = unit_square_two_triangles();
	const SparseMatrix A = assemble_stiffness(m);
	const double want[4][4] = {{1.0, -0.5, 0.0, -0.5},
	                           {-0.5, 1.0, -0.5, 0.0},
	                           {0.0, -0.5, 1.0, -0.5},
	                           {-0.5, 0.0, -0.5, 1.0}};
	for (int i = 0; i < 4; ++i)
		for (int j = 0; j < 4; ++j)
			CHECK(A.get(i, j) == doctest::Approx(want[i][j]).epsilon(1e-14));

	const SparseMatrix M = assemble_mass(m);
	CHECK(M.get(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
	CHECK(M.get(1, 1) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
	CHECK(M.get(0, 2) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
	CHECK(M.get(1, 3) == 0.0);
}

TEST_CASE("stiffness rows sum to zero and mass sums to the area") {
	Mesh m = build_initial_mesh(1.5 * kPi);
	for (int round = 0; round < 4; ++round) {
		m = bisect_all(m);
		const SparseMatrix A = assemble_stiffness(m);
		double worst = 0.0;
		for (int i = 0; i < A.n; ++i) {
			double s = 0.0;
			for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
				s += A.val[k];
			worst = std::max(worst, std::abs(s));
		}
		CHECK(worst <= 1e-12);

		const SparseMatrix M = assemble_mass(m);
		const double total = std::accumulate(M.val.begin(), M.val.end(), 0.0);
		CHECK(total == doctest::Approx(3.0).epsilon(1e-12));
	}
}

TEST_CASE("mass matrix is positive definite on random vectors") {
	Mesh m = build_initial_mesh(1.5 * kPi);
	m = bisect_all(bisect_all(m));
	const SparseMatrix M = assemble_mass(m);
	std::mt19937 rng(1234);
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	for (int trial = 0; trial < 100; ++trial) {
		std::vector<double> x(static_cast<std::size_t>(M.n));
		for (double& xi : x)
			xi = u(rng);
		const std::vector<double> y = matvec(M, x);
		const double quad = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
		CHECK(quad > 0.0);
	}
}

TEST_CASE("interior vertices appear with refinement") {
	const Mesh m0 = build_initial_mesh(1.5 * kPi);
	CHECK(interior_vertices(m0).empty());
	const Mesh m1 = bisect_all(m0);
	CHECK(interior_vertices(m1).size() == 3);
	for (int v : interior_vertices(m1))
		CHECK_FALSE(m1.on_boundary[static_cast<std::size_t>(v)]);
}

TEST_CASE("lifting places trace values on the boundary and zero inside") {
	Mesh m = build_initial_mesh(1.5 * kPi);
	m = bisect_all(bisect_all(m));
	TraceField tr{&m, std::vector<double>(m.boundary_loop.size(), 1.0)};
	const NodalField g = lifting(m, tr);
	for (int v = 0; v < m.vertex_count(); ++v)
		CHECK(g.values[static_cast<std::size_t>(v)] == (m.on_boundary[static_cast<std::size_t>(v)] ? 1.0 : 0.0));
}

TEST_CASE("lifting energy tracks the inverse square root of h") {
	std::vector<double> ratios;
	Mesh m = build_initial_mesh(1.5 * kPi);
	for (int round = 1; round <= 8; ++round) {
		m = bisect_all(m);
		if (round % 2 != 0)
			continue;
		TraceField tr{&m, {}};
		tr.values.resize(m.boundary_loop.size());
		for (std::size_t k = 0; k < tr.values.size(); ++k)
			tr.values[k] = (k % 2 == 0) ? 1.0 : -1.0; // rough data
		const NodalField g = lifting(m, tr);
		const SparseMatrix A = assemble_stiffness(m);
		const std::vector<double> Ag = matvec(A, g.values);
		const double energy =
		    std::inner_product(g.values.begin(), g.values.end(), Ag.begin(), 0.0);
		const double tnorm = trace_l2_norm(m, tr);
		REQUIRE(tnorm > 0.0);
		ratios.push_back(std::sqrt(energy) * std::sqrt(mesh_h(m)) / tnorm);
	}
	for (double r : ratios)
		CHECK(r <= 2.0 * ratios.front());
}

TEST_CASE("zero boundary data yields the zero solution") {
	Mesh m = build_initial_mesh(1.5 * kPi);
	m = bisect_all(bisect_all(m));
	TraceField tr{&m, std::vector<double>(m.boundary_loop.size(), 0.0)};
	const NodalField y = solve_poisson_dirichlet(m, nullptr, tr);
	for (double v : y.values)
		CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("affine boundary data is reproduced exactly") {
	Mesh m = build_initial_mesh(1.5 * kPi);
	for (int i = 0; i < 4; ++i)
		m = bisect_all(m);
	const TraceField tr = trace_from_function(m, [](Vec2 p) { return p.x; });
	const NodalField y = solve_poisson_dirichlet(m, nullptr, tr, 1e-12);
	for (int v = 0; v < m.vertex_count(); ++v)
		CHECK(y.values[static_cast<std::size_t>(v)] ==
		      doctest::Approx(m.vertices[static_cast<std::size_t>(v)].x).epsilon(1e-9));
}

TEST_CASE("discrete solution satisfies the interior equations") {
	Mesh m = build_initial_mesh(1.5 * kPi);
	for (int i = 0; i < 4; ++i)
		m = bisect_all(m);
	const ScalarFn f = [](Vec2 p) { return p.x * p.y; };
	const TraceField tr = trace_from_function(m, [](Vec2 p) { return p.x * p.x - p.y; });
	const NodalField y = solve_poisson_dirichlet(m, f, tr, 1e-12);

	const SparseMatrix A = assemble_stiffness(m);
	const std::vector<double> Ay = matvec(A, y.values);
	const std::vector<double> b = load_vector(m, f);
	double scale = 0.0, worst = 0.0;
	for (int v : interior_vertices(m)) {
		worst = std::max(worst, std::abs(Ay[static_cast<std::size_t>(v)] - b[static_cast<std::size_t>(v)]));
		scale = std::max(scale, std::abs(b[static_cast<std::size_t>(v)]));
	}
	CHECK(worst <= 1e-9 * std::max(1.0, scale));
}

TEST_CASE("manufactured smooth problem converges at second order") {
	const ScalarFn exact = [](Vec2 p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); };
	const ScalarFn f = [&](Vec2 p) { return 2.0 * kPi * kPi * exact(p); };
	std::vector<double> errors, hs;
	Mesh m = build_initial_mesh(kPi / 2.0);
	for (int round = 1; round <= 8; ++round) {
		m = bisect_all(m);
		if (round % 2 != 0 || round < 2)
			continue;
		TraceField tr{&m, std::vector<double>(m.boundary_loop.size(), 0.0)};
		const NodalField y = solve_poisson_dirichlet(m, f, tr, 1e-12);
		errors.push_back(fem_l2_error(m, y.values, exact));
		hs.push_back(mesh_h(m));
	}
	REQUIRE(errors.size() == 4);
	for (std::size_t i = 2; i < errors.size(); ++i) {
		const double rate = std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]);
		CHECK(rate == doctest::Approx(2.0).epsilon(0.075));
	}
}

TEST_CASE("load vector integrates polynomial sources exactly") {
	Mesh m = build_initial_mesh(1.5 * kPi);
	m = bisect_all(bisect_all(m));
	const std::vector<double> ones_load = load_vector(m, [](Vec2) { return 1.0; });
	CHECK(std::accumulate(ones_load.begin(), ones_load.end(), 0.0) ==
	      doctest::Approx(3.0).epsilon(1e-12));
	const std::vector<double> x_load = load_vector(m, [](Vec2 p) { return p.x; });
	CHECK(std::accumulate(x_load.begin(), x_load.end(), 0.0) ==
	      doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("conjugate gradients inverts a diagonal matrix") {
	SparseMatrix A;
	A.n = 5;
	A.row_ptr = {0, 1, 2, 3, 4, 5};
	A.col = {0, 1, 2, 3, 4};
	A.val = {1.0, 2.0, 4.0, 8.0, 16.0};
	const std::vector<double> b = {1.0, 1.0, 1.0, 1.0, 1.0};
	const CgResult r = cg_solve(A, b, 1e-14);
	CHECK(r.converged);
	for (int i = 0; i < 5; ++i)
		CHECK(r.x[static_cast<std::size_t>(i)] == doctest::Approx(1.0 / A.val[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("conjugate gradients returns zero for a zero right-hand side") {
	SparseMatrix A;
	A.n = 3;
	A.row_ptr = {0, 1, 2, 3};
	A.col = {0, 1, 2};
	A.val = {2.0, 3.0, 5.0};
	const std::vector<double> b(3, 0.0);
	const CgResult r = cg_solve(A, b);
	CHECK(r.converged);
	CHECK(r.iterations == 0);
	for (double xi : r.x)
		CHECK(xi == 0.0);
}

TEST_CASE("conjugate gradients matches dense elimination on a random SPD system") {
	std::mt19937 rng(99);
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	const int n = 10;
	std::vector<double> B(static_cast<std::size_t>(n * n));
	for (double& e : B)
		e = u(rng);
	std::vector<double> dense(static_cast<std::size_t>(n * n), 0.0);
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j) {
			double s = (i == j) ? 10.0 : 0.0;
			for (int k = 0; k < n; ++k)
				s += B[static_cast<std::size_t>(k * n + i)] * B[static_cast<std::size_t>(k * n + j)];
			dense[static_cast<std::size_t>(i * n + j)] = s;
		}

	SparseMatrix A;
	A.n = n;
	A.row_ptr.resize(static_cast<std::size_t>(n + 1));
	for (int i = 0; i <= n; ++i)
		A.row_ptr[static_cast<std::size_t>(i)] = i * n;
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j) {
			A.col.push_back(j);
			A.val.push_back(dense[static_cast<std::size_t>(i * n + j)]);
		}

	std::vector<double> b(static_cast<std::size_t>(n));
	for (double& e : b)
		e = u(rng);

	const std::vector<double> want = oracle::dense_solve(dense, b);
	const CgResult r = cg_solve(A, b, 1e-13);
	REQUIRE(r.converged);
	for (int i = 0; i < n; ++i)
		CHECK(r.x[static_cast<std::size_t>(i)] == doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-10));

	const std::vector<double> direct = envelope_cholesky_solve(A, [] {
		std::vector<int> id(10);
		std::iota(id.begin(), id.end(), 0);
		return id;
	}(), b);
	for (int i = 0; i < n; ++i)
		CHECK(direct[static_cast<std::size_t>(i)] == doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-12));

	CHECK_THROWS(envelope_cholesky_solve(A, [] {
		std::vector<int> id(10);
		std::iota(id.begin(), id.end(), 0);
		return id;
	}(), b, 5));
}

TEST_CASE("envelope elimination rejects indefinite matrices") {
	SparseMatrix A;
	A.n = 2;
	A.row_ptr = {0, 1, 2};
	A.col = {0, 1};
	A.val = {1.0, -1.0};
	const std::vector<double> b = {1.0, 1.0};
	CHECK_THROWS(envelope_cholesky_solve(A, {0, 1}, b));
}

TEST_CASE("envelope elimination agrees with conjugate gradients on a stiffness system") {
	Mesh m = build_initial_mesh(1.5 * kPi);
	for (int i = 0; i < 6; ++i)
		m = bisect_all(m);
	const std::vector<int> interior = interior_vertices(m);
	const SparseMatrix A = restrict_to(assemble_stiffness(m), interior);
	std::vector<double> b(interior.size());
	for (std::size_t k = 0; k < b.size(); ++k)
		b[k] = std::sin(0.37 * static_cast<double>(k));
	std::vector<int> order(interior.size());
	std::iota(order.begin(), order.end(), 0);

	const std::vector<double> direct = envelope_cholesky_solve(A, order, b);
	const CgResult iterative = cg_solve(A, b, 1e-13);
	REQUIRE(iterative.converged);
	double scale = 0.0;
	for (double v : direct)
		scale = std::max(scale, std::abs(v));
	for (std::size_t k = 0; k < b.size(); ++k)
		CHECK(std::abs(direct[k] - iterative.x[k]) <= 1e-8 * scale);
}

TEST_CASE("triangle quadrature rules integrate monomials exactly") {
	const auto factorial = [](int k) {
		double f = 1.0;
		for (int i = 2; i <= k; ++i)
			f *= i;
		return f;
	};
	const auto exact = [&](int i, int j) {
		return factorial(i) * factorial(j) / factorial(i + j + 2);
	};
	const auto apply = [](std::span<const TriQuadPoint> rule, int i, int j) {
		double s = 0.0;
		for (const TriQuadPoint& q : rule)
			s += q.w * std::pow(q.b1, i) * std::pow(q.b2, j);
		return 0.5 * s; // reference triangle area
	};
	for (int i = 0; i + 0 <= 6; ++i)
		for (int j = 0; i + j <= 6; ++j) {
			if (i + j <= 2)
				CHECK(apply(tri_rule_midpoint(), i, j) == doctest::Approx(exact(i, j)).epsilon(1e-13));
			if (i + j <= 4)
				CHECK(apply(tri_rule_degree4(), i, j) == doctest::Approx(exact(i, j)).epsilon(1e-13));
			CHECK(apply(tri_rule_degree6(), i, j) == doctest::Approx(exact(i, j)).epsilon(1e-13));
		}
}

TEST_CASE("gauss-legendre rules integrate high-degree polynomials") {
	const GaussRule1d& rule = gauss_legendre(16);
	REQUIRE(rule.nodes.size() == 16);
	for (int k = 0; k <= 31; ++k) {
		double s = 0.0;
		for (std::size_t q = 0; q < rule.nodes.size(); ++q)
			s += rule.weights[q] * std::pow(rule.nodes[q], k);
		const double want = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
		CHECK(s == doctest::Approx(want).epsilon(1e-13).scale(1.0));
	}
}
