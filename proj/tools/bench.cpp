#include "cornerfem/fem.hpp"
#include "cornerfem/mesh.hpp"
#include "cornerfem/parallel.hpp"
#include "cornerfem/singular.hpp"
#include "cornerfem/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

namespace {

using namespace cornerfem;

double seconds(const std::function<void()>& fn) {
	double best = 1e300;
	for (int rep = 0; rep < 3; ++rep) {
		const auto t0 = std::chrono::steady_clock::now();
		fn();
		const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		if (s < best)
			best = s;
	}
	return best;
}

void row(const char* name, double serial, double parallel, double diff) {
	std::printf("%-18s %10.4f s %10.4f s %8.2fx   max dev %.3g\n", name, serial, parallel,
	            serial / parallel, diff);
}

} // namespace

int main() {
	const double omega = 270.0 * std::numbers::pi / 180.0;
	Mesh m = build_initial_mesh(omega);
	for (int r = 0; r < 13; ++r)
		m = bisect_all(m);
	std::printf("mesh: %d vertices, %d triangles, %d threads\n\n", m.vertex_count(),
	            m.triangle_count(), par::max_threads());
	std::printf("%-18s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

	const auto probe = [&](const SparseMatrix& A) {
		std::vector<double> x(static_cast<std::size_t>(m.vertex_count()));
		for (std::size_t i = 0; i < x.size(); ++i)
			x[i] = std::sin(0.1 * static_cast<double>(i));
		const std::vector<double> y = matvec(A, x);
		double s = 0.0;
		for (std::size_t i = 0; i < y.size(); ++i)
			s += y[i] * x[i];
		return s;
	};

	{
		SparseMatrix a_par, a_ser;
		const double ts = seconds([&] { a_ser = reference::assemble_stiffness(m); });
		const double tp = seconds([&] { a_par = assemble_stiffness(m); });
		row("stiffness", ts, tp, std::abs(probe(a_par) - probe(a_ser)));
	}
	{
		SparseMatrix a_par, a_ser;
		const double ts = seconds([&] { a_ser = reference::assemble_mass(m); });
		const double tp = seconds([&] { a_par = assemble_mass(m); });
		row("mass", ts, tp, std::abs(probe(a_par) - probe(a_ser)));
	}
	{
		const auto exact = [](Vec2 p) {
			const Polar q = polar_of(p);
			return std::pow(q.r, -0.4999) * std::sin(-0.4999 * q.theta);
		};
		NodalField zero = zero_field(m);
		double es = 0.0, ep = 0.0;
		const double ts = seconds([&] { es = reference::l2_error(zero, exact, 16); });
		const double tp = seconds([&] { ep = l2_error(zero, exact, 16); });
		row("l2_error", ts, tp, std::abs(es - ep));
	}
	{
		const SingularExponent s(omega);
		SingularVolume vs, vp;
		const double ts = seconds([&] { vs = reference::singular_volume(m, s, 16); });
		const double tp = seconds([&] { vp = singular_volume(m, s, 16); });
		double dev = std::abs(vs.norm_sq - vp.norm_sq);
		for (std::size_t i = 0; i < vs.hat_pairing.size(); ++i)
			dev = std::max(dev, std::abs(vs.hat_pairing[i] - vp.hat_pairing[i]));
		row("singular_volume", ts, tp, dev);
	}
	return 0;
}
