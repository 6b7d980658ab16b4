#pragma once

#include <array>
#include <span>
#include <vector>

namespace cornerfem {

struct GaussRule1d {
	std::vector<double> nodes;   // on (-1, 1)
	std::vector<double> weights; // sum = 2
};

// Gauss-Legendre rule, computed once per order and cached.
const GaussRule1d& gauss_legendre(int n);

struct TriQuadPoint {
	double b0, b1, b2; // barycentric coordinates
	double w;          // weight, sums to 1 over the rule
};

// degree-4 rule, 6 points
std::span<const TriQuadPoint> tri_rule_degree4();
// degree-6 rule, 12 points
std::span<const TriQuadPoint> tri_rule_degree6();
// degree-2 rule on edge midpoints, 3 points (used for load vectors)
std::span<const TriQuadPoint> tri_rule_midpoint();

} // namespace cornerfem
