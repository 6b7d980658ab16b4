#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cornerfem/study.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace cornerfem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDatumExponent = 0.4999;

Mesh pacman(int rounds, double omega = 1.5 * kPi) {
	Mesh m = build_initial_mesh(omega);
	for (int i = 0; i < rounds; ++i)
		m = bisect_all(m);
	return m;
}

double rough_datum(Vec2 p) {
	const Polar q = polar_of(p);
	if (q.r == 0.0)
		return 0.0;
	return std::pow(q.r, -kDatumExponent) * std::sin(-kDatumExponent * q.theta);
}

} // namespace

TEST_CASE("error of an interpolated affine function is zero") {
	const Mesh m = pacman(3);
	const auto affine = [](Vec2 p) { return 0.4 * p.x - 1.1 * p.y + 0.3; };
	NodalField y{&m, {}};
	y.values.resize(static_cast<std::size_t>(m.vertex_count()));
	for (int v = 0; v < m.vertex_count(); ++v)
		y.values[static_cast<std::size_t>(v)] = affine(m.vertices[static_cast<std::size_t>(v)]);
	CHECK(l2_error(y, affine) <= 1e-12);
}

TEST_CASE("error of the zero field recovers the datum norm") {
	const Mesh m = pacman(4);
	const NodalField z = zero_field(m);
	const double got = l2_error(z, rough_datum);
	const double want = std::sqrt(oracle::datum_norm_sq(1.5 * kPi, kDatumExponent));
	CHECK(got == doctest::Approx(want).epsilon(1e-3));
}

TEST_CASE("shallow corner layering is rejected") {
	const Mesh m = pacman(3);
	CHECK_THROWS(l2_error(zero_field(m), rough_datum, 1));
}

TEST_CASE("parallel and reference error integration agree bitwise") {
	const Mesh m = pacman(4);
	NodalField y{&m, {}};
	y.values.resize(static_cast<std::size_t>(m.vertex_count()));
	for (int v = 0; v < m.vertex_count(); ++v)
		y.values[static_cast<std::size_t>(v)] = std::sin(0.31 * v);
	CHECK(l2_error(y, rough_datum) == reference::l2_error(y, rough_datum));
}

TEST_CASE("error integration is invariant under vertex renumbering") {
	const Mesh a = pacman(3);
	// reverse the vertex order; triangles keep their order so per-triangle
	// contributions are summed identically
	const int n = a.vertex_count();
	std::vector<Vec2> verts(static_cast<std::size_t>(n));
	for (int v = 0; v < n; ++v)
		verts[static_cast<std::size_t>(n - 1 - v)] = a.vertices[static_cast<std::size_t>(v)];
	std::vector<Tri> tris = a.triangles;
	for (Tri& t : tris)
		for (int i = 0; i < 3; ++i)
			t.v[i] = n - 1 - t.v[i];
	std::vector<BoundaryEdge> edges = a.boundary_edges;
	for (BoundaryEdge& e : edges) {
		e.a = n - 1 - e.a;
		e.b = n - 1 - e.b;
	}
	const Mesh b = make_mesh(verts, tris, edges, a.omega);

	NodalField ya{&a, {}}, yb{&b, {}};
	ya.values.resize(static_cast<std::size_t>(n));
	yb.values.resize(static_cast<std::size_t>(n));
	for (int v = 0; v < n; ++v) {
		const double val = std::cos(0.17 * v);
		ya.values[static_cast<std::size_t>(v)] = val;
		yb.values[static_cast<std::size_t>(n - 1 - v)] = val;
	}
	CHECK(l2_error(ya, rough_datum) == l2_error(yb, rough_datum));
}

TEST_CASE("corrected solutions include the dual tail in the error") {
	const Mesh m = pacman(4);
	DscmSolution z;
	z.lambda = 2.0 / 3.0;
	z.delta = 1.0;
	z.z_tilde = zero_field(m);
	// the field is exactly delta * s-, so measuring against it leaves zero
	const auto tail = [&](Vec2 p) {
		const Polar q = polar_of(p);
		return std::pow(q.r, -z.lambda) * std::sin(z.lambda * q.theta);
	};
	CHECK(l2_error(z, tail) <= 1e-10);
	// and the plain field alone is far away
	CHECK(l2_error(z.z_tilde, tail) > 0.1);
}

TEST_CASE("convergence orders follow the error ratios") {
	// halving the error while quadrupling the unknowns is order one
	const std::vector<double> errors = {1.0, 0.5, 0.25};
	const std::vector<long> unknowns = {100, 400, 1600};
	const std::vector<double> rates = eoc(errors, unknowns);
	REQUIRE(rates.size() == 2);
	CHECK(rates[0] == doctest::Approx(1.0).epsilon(1e-12));
	CHECK(rates[1] == doctest::Approx(1.0).epsilon(1e-12));

	// hand-computed: 8060 -> 32976 unknowns with errors 0.7074 -> 0.6077
	const std::vector<double> errs_slow = {0.7074, 0.6077};
	const std::vector<long> ns = {8060, 32976};
	CHECK(eoc(errs_slow, ns)[0] == doctest::Approx(0.215).epsilon(0.005));

	// near order one half: 0.02817 -> 0.01984 over the same growth
	const std::vector<double> errs_fast = {0.02817, 0.01984};
	CHECK(eoc(errs_fast, ns)[0] == doctest::Approx(0.4987).epsilon(0.005));

	CHECK_THROWS(eoc({1.0}, {100}));
	CHECK_THROWS(eoc({1.0, -0.5}, {100, 400}));
	CHECK_THROWS(eoc({1.0, 0.5}, {100}));
	CHECK_THROWS(eoc({1.0, 0.5}, {100, 0}));
}

TEST_CASE("experiment configs are validated") {
	ExperimentConfig bad;
	bad.levels = 1;
	CHECK_THROWS(run_experiment(bad));

	ExperimentConfig graded;
	graded.method = Method::graded;
	graded.mu = 0.0;
	graded.levels = 2;
	CHECK_THROWS(run_experiment(graded));

	ExperimentConfig convex;
	convex.method = Method::dscm;
	convex.omega_deg = 90.0;
	convex.levels = 2;
	CHECK_THROWS(run_experiment(convex));

	ExperimentConfig underflow;
	underflow.method = Method::graded;
	underflow.mu = 0.014085;
	underflow.levels = 30;
	CHECK_THROWS(run_experiment(underflow));
}

TEST_CASE("standard ladder reports the expected unknown counts") {
	ExperimentConfig cfg;
	cfg.levels = 3;
	const ExperimentReport rep = run_experiment(cfg);
	REQUIRE(rep.rows.size() == 3);
	CHECK(rep.rows[0].unknowns == 33);
	CHECK(rep.rows[1].unknowns == 161);
	CHECK(rep.rows[2].unknowns == 705);
	CHECK_FALSE(rep.rows[0].eoc.has_value());
	REQUIRE(rep.rows[1].eoc.has_value());
	REQUIRE(rep.rows[2].eoc.has_value());
	for (std::size_t i = 1; i < rep.rows.size(); ++i)
		CHECK(rep.rows[i].error < rep.rows[i - 1].error);
	CHECK(rep.rows[0].error > 0.0);
	CHECK(rep.wall_seconds > 0.0);
}

TEST_CASE("experiments are deterministic") {
	ExperimentConfig cfg;
	cfg.levels = 2;
	const ExperimentReport a = run_experiment(cfg);
	const ExperimentReport b = run_experiment(cfg);
	REQUIRE(a.rows.size() == b.rows.size());
	for (std::size_t i = 0; i < a.rows.size(); ++i) {
		CHECK(a.rows[i].unknowns == b.rows[i].unknowns);
		CHECK(a.rows[i].error == b.rows[i].error);
	}
}

TEST_CASE("graded ladder passes its own grading checks") {
	ExperimentConfig cfg;
	cfg.method = Method::graded;
	cfg.mu = 0.5;
	cfg.levels = 2;
	const ExperimentReport rep = run_experiment(cfg);
	REQUIRE(rep.rows.size() == 2);
	CHECK(rep.rows[1].unknowns > rep.rows[0].unknowns);
	CHECK(rep.rows[1].error < rep.rows[0].error);
}

TEST_CASE("corrected ladder overtakes the standard one") {
	// the correction pays off asymptotically: by level 5 its error is below
	// the standard one and its rate is near 1/2 while the standard rate
	// stays near the slow limit
	ExperimentConfig plain, corrected;
	plain.levels = 5;
	corrected.levels = 5;
	corrected.method = Method::dscm;
	const ExperimentReport a = run_experiment(plain);
	const ExperimentReport d = run_experiment(corrected);
	REQUIRE(a.rows.size() == 5);
	REQUIRE(d.rows.size() == 5);
	CHECK(d.rows[4].error < a.rows[4].error);
	CHECK(*d.rows[4].eoc > 0.45);
	CHECK(*a.rows[4].eoc < 0.27);
}

TEST_CASE("report files carry the configuration and the table") {
	const std::string path = "study_report_test.csv";
	ExperimentConfig cfg;
	cfg.levels = 2;
	cfg.out_path = path;
	const ExperimentReport rep = run_experiment(cfg);

	std::ifstream in(path);
	REQUIRE(in.good());
	std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
	in.close();
	std::remove(path.c_str());

	CHECK(text.find("# omega_degrees = 270") != std::string::npos);
	CHECK(text.find("# method = standard") != std::string::npos);
	CHECK(text.find("unknowns,error,eoc") != std::string::npos);
	CHECK(text.find("33,") != std::string::npos);
	CHECK(text.find("161,") != std::string::npos);

	// first data row has a trailing empty eoc column
	std::istringstream lines(text);
	std::string line;
	bool saw_first_row = false;
	while (std::getline(lines, line)) {
		if (line.rfind("33,", 0) == 0) {
			saw_first_row = true;
			CHECK(line.back() == ',');
		}
	}
	CHECK(saw_first_row);

	std::ostringstream os;
	write_report_csv(os, rep);
	CHECK(os.str() == text);
}
