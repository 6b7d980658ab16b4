#include "cornerfem/geometry.hpp"

#include <numbers>

namespace cornerfem {

Polar polar_of(Vec2 p) {
	const double r = std::hypot(p.x, p.y);
	if (r == 0.0)
		return {0.0, 0.0};
	double theta = std::atan2(p.y, p.x);
	if (theta < 0.0)
		theta += 2.0 * std::numbers::pi;
	return {r, theta};
}

} // namespace cornerfem
