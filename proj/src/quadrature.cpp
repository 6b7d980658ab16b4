#include "cornerfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cornerfem {

namespace {

GaussRule1d compute_gauss(int n) {
	if (n < 1)
		throw std::invalid_argument("gauss_legendre: order must be positive");
	GaussRule1d rule;
	rule.nodes.resize(n);
	rule.weights.resize(n);
	// Newton iteration from the Chebyshev-like initial guess; nodes come out
	// sorted ascending.
	for (int i = 0; i < (n + 1) / 2; ++i) {
		double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
		double dp = 0.0;
		for (int it = 0; it < 100; ++it) {
			double p0 = 1.0, p1 = x;
			for (int k = 2; k <= n; ++k) {
				const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
				p0 = p1;
				p1 = p2;
			}
			dp = n * (x * p1 - p0) / (x * x - 1.0);
			const double dx = p1 / dp;
			x -= dx;
			if (std::abs(dx) < 1e-15)
				break;
		}
		const double w = 2.0 / ((1.0 - x * x) * dp * dp);
		rule.nodes[n - 1 - i] = x;
		rule.weights[n - 1 - i] = w;
		rule.nodes[i] = -x;
		rule.weights[i] = w;
	}
	if (n % 2 == 1) {
		rule.nodes[n / 2] = 0.0;
	}
	return rule;
}

} // namespace

const GaussRule1d& gauss_legendre(int n) {
	static std::map<int, GaussRule1d> cache;
	static std::mutex mtx;
	std::lock_guard<std::mutex> lock(mtx);
	auto it = cache.find(n);
	if (it == cache.end())
		it = cache.emplace(n, compute_gauss(n)).first;
	return it->second;
}

std::span<const TriQuadPoint> tri_rule_degree4() {
	// 6-point degree-4 rule
	static const double a1 = 0.816847572980459, b1 = 0.091576213509771,
	                    w1 = 0.109951743655322;
	static const double a2 = 0.108103018168070, b2 = 0.445948490915965,
	                    w2 = 0.223381589678011;
	static const TriQuadPoint pts[6] = {
	    {a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
	    {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2},
	};
	return pts;
}

std::span<const TriQuadPoint> tri_rule_degree6() {
	// 12-point degree-6 rule, all weights positive
	static const double a1 = 0.501426509658179, b1 = 0.249286745170910,
	                    w1 = 0.116786275726379;
	static const double a2 = 0.873821971016996, b2 = 0.063089014491502,
	                    w2 = 0.050844906370207;
	static const double a3 = 0.053145049844816, b3 = 0.310352451033785,
	                    c3 = 0.636502499121399, w3 = 0.082851075618374;
	static const TriQuadPoint pts[12] = {
	    {a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
	    {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2},
	    {a3, b3, c3, w3}, {a3, c3, b3, w3}, {b3, a3, c3, w3},
	    {b3, c3, a3, w3}, {c3, a3, b3, w3}, {c3, b3, a3, w3},
	};
	return pts;
}

std::span<const TriQuadPoint> tri_rule_midpoint() {
	static const double w = 1.0 / 3.0;
	static const TriQuadPoint pts[3] = {
	    {0.5, 0.5, 0.0, w},
	    {0.0, 0.5, 0.5, w},
	    {0.5, 0.0, 0.5, w},
	};
	return pts;
}

} // namespace cornerfem
