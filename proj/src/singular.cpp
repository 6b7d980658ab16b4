#include "cornerfem/singular.hpp"

#include "cornerfem/parallel.hpp"
#include "cornerfem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cornerfem {

SingularExponent::SingularExponent(double omega_) {
	if (!(omega_ > 0.0) || !(omega_ < 2.0 * std::numbers::pi))
		throw std::invalid_argument("SingularExponent: omega must lie in (0, 2*pi)");
	omega = omega_;
	lambda = std::numbers::pi / omega_;
}

double eval_primal(const SingularExponent& s, Vec2 p) {
	const Polar q = polar_of(p);
	if (q.r == 0.0)
		return 0.0;
	return std::pow(q.r, s.lambda) * std::sin(s.lambda * q.theta);
}

Vec2 grad_primal(const SingularExponent& s, Vec2 p) {
	const Polar q = polar_of(p);
	if (q.r == 0.0)
		throw std::domain_error("grad_primal: gradient is singular at the origin");
	const double c = s.lambda * std::pow(q.r, s.lambda - 1.0);
	return {c * std::sin((s.lambda - 1.0) * q.theta), c * std::cos((s.lambda - 1.0) * q.theta)};
}

double eval_dual(const SingularExponent& s, Vec2 p) {
	const Polar q = polar_of(p);
	if (q.r == 0.0)
		throw std::domain_error("eval_dual: singular at the origin");
	return std::pow(q.r, -s.lambda) * std::sin(s.lambda * q.theta);
}

double normal_derivative_primal(const SingularExponent& s, Vec2 p, Vec2 outward_normal) {
	return dot(grad_primal(s, p), outward_normal);
}

namespace {

// affine barycentric functionals of a triangle, evaluable anywhere
struct Bary {
	double c[3];
	Vec2 g[3];

	static Bary of(Vec2 p0, Vec2 p1, Vec2 p2) {
		const double twoA = cross(p1 - p0, p2 - p0);
		Bary b;
		const Vec2 d[3] = {{p1.y - p2.y, p2.x - p1.x},
		                   {p2.y - p0.y, p0.x - p2.x},
		                   {p0.y - p1.y, p1.x - p0.x}};
		const Vec2 p[3] = {p0, p1, p2};
		for (int i = 0; i < 3; ++i) {
			b.g[i] = (1.0 / twoA) * d[i];
			b.c[i] = 1.0 - dot(b.g[i], p[i]);
		}
		return b;
	}

	void eval(Vec2 x, double out[3]) const {
		for (int i = 0; i < 3; ++i)
			out[i] = c[i] + dot(g[i], x);
	}
};

struct VolAcc {
	double norm = 0.0;
	double pair[3] = {0.0, 0.0, 0.0};
};

// (s-)^2 and s- times the parent triangle's three hats over one sub-triangle
void dual_on_subtri(VolAcc& acc, Vec2 a, Vec2 b, Vec2 c, const Bary& hats,
                    const SingularExponent& s) {
	const double area = 0.5 * cross(b - a, c - a);
	for (const TriQuadPoint& q : tri_rule_degree6()) {
		const Vec2 x = q.b0 * a + q.b1 * b + q.b2 * c;
		const double sd = eval_dual(s, x);
		double lam[3];
		hats.eval(x, lam);
		const double w = q.w * area;
		acc.norm += w * sd * sd;
		for (int i = 0; i < 3; ++i)
			acc.pair[i] += w * sd * lam[i];
	}
}

template <class AddFn>
void quadrisect(Vec2 a, Vec2 b, Vec2 c, int depth, const AddFn& add) {
	if (depth == 0) {
		add(a, b, c);
		return;
	}
	const Vec2 ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
	quadrisect(a, ab, ca, depth - 1, add);
	quadrisect(ab, b, bc, depth - 1, add);
	quadrisect(ca, bc, c, depth - 1, add);
	quadrisect(ab, bc, ca, depth - 1, add);
}

// uniform refinement depth so sub-triangles are small against their distance
// from the origin; keeps the degree-6 rule in its fast-convergence regime
int subdivision_depth(double diameter, double r_min) {
	int depth = 0;
	double d = diameter;
	while (d > 0.25 * r_min && depth < 8) {
		d *= 0.5;
		++depth;
	}
	return depth;
}

// Exact radial integration over the cone triangle (0, A, B): for a chord
// distance R(theta) the radial factor of r^p against the area element is
// R^(2+p)/(2+p). The angular integrand is analytic; Gauss-32 is exact to
// machine precision at the spans that occur (<= pi/4).
struct ConeGeometry {
	Vec2 n;
	double cn, theta_a, theta_b;

	ConeGeometry(Vec2 A, Vec2 B) {
		n = perp_out(B - A);
		cn = dot(n, A);
		if (cn < 0.0) {
			n = -1.0 * n;
			cn = -cn;
		}
		theta_a = polar_of(A).theta;
		theta_b = polar_of(B).theta;
		if (!(theta_b > theta_a) || theta_b - theta_a >= std::numbers::pi)
			throw std::logic_error("cone integration: bad angular span at the corner");
	}

	double radius(double theta) const {
		return cn / (n.x * std::cos(theta) + n.y * std::sin(theta));
	}
};

template <class Fn>
void angular_gauss(const ConeGeometry& cone, const Fn& fn) {
	const GaussRule1d& g = gauss_legendre(32);
	const double mid = 0.5 * (cone.theta_a + cone.theta_b);
	const double half = 0.5 * (cone.theta_b - cone.theta_a);
	for (std::size_t i = 0; i < g.nodes.size(); ++i) {
		const double theta = mid + half * g.nodes[i];
		fn(theta, half * g.weights[i], cone.radius(theta));
	}
}

void dual_on_apex(VolAcc& acc, Vec2 A, Vec2 B, const Bary& hats, const SingularExponent& s) {
	const ConeGeometry cone(A, B);
	const double l = s.lambda;
	angular_gauss(cone, [&](double theta, double w, double R) {
		const double sinl = std::sin(l * theta);
		const Vec2 u{std::cos(theta), std::sin(theta)};
		acc.norm += w * sinl * sinl * std::pow(R, 2.0 - 2.0 * l) / (2.0 - 2.0 * l);
		const double m2 = std::pow(R, 2.0 - l) / (2.0 - l);
		const double m3 = std::pow(R, 3.0 - l) / (3.0 - l);
		for (int i = 0; i < 3; ++i)
			acc.pair[i] += w * sinl * (hats.c[i] * m2 + dot(hats.g[i], u) * m3);
	});
}

// contribution of triangle t; for corner triangles `layers` geometric layers
// (ratio 1/2) end in a radially-exact apex piece, so nothing is truncated
VolAcc dual_tri_contrib(const Mesh& m, int t, const SingularExponent& s, int layers) {
	const Tri& T = m.triangles[t];
	const Vec2 p[3] = {m.vertices[T.v[0]], m.vertices[T.v[1]], m.vertices[T.v[2]]};
	const Bary hats = Bary::of(p[0], p[1], p[2]);
	VolAcc acc;

	int oi = -1;
	for (int i = 0; i < 3; ++i)
		if (T.v[i] == m.origin_vertex)
			oi = i;

	if (oi < 0) {
		double r_min = norm(p[0]);
		for (int i = 1; i < 3; ++i)
			r_min = std::min(r_min, norm(p[i]));
		const int depth = subdivision_depth(triangle_diameter(m, t), r_min);
		quadrisect(p[0], p[1], p[2], depth,
		           [&](Vec2 a, Vec2 b, Vec2 c) { dual_on_subtri(acc, a, b, c, hats, s); });
		return acc;
	}

	const Vec2 A = p[(oi + 1) % 3];
	const Vec2 B = p[(oi + 2) % 3];
	for (int k = 0; k < layers; ++k) {
		const double so = std::ldexp(1.0, -k);
		const double si = 0.5 * so;
		auto add = [&](Vec2 a, Vec2 b, Vec2 c) { dual_on_subtri(acc, a, b, c, hats, s); };
		quadrisect(si * A, so * A, so * B, 2, add);
		quadrisect(si * A, so * B, si * B, 2, add);
	}
	const double se = std::ldexp(1.0, -layers);
	dual_on_apex(acc, se * A, se * B, hats, s);
	return acc;
}

struct VolumeTotals {
	double norm_sq = 0.0;
	std::vector<double> pairing;
};

VolumeTotals reduce_contribs(const Mesh& m, const std::vector<VolAcc>& per_tri) {
	VolumeTotals tot;
	tot.pairing.assign(m.vertex_count(), 0.0);
	for (int t = 0; t < m.triangle_count(); ++t) {
		tot.norm_sq += per_tri[t].norm;
		for (int i = 0; i < 3; ++i)
			tot.pairing[m.triangles[t].v[i]] += per_tri[t].pair[i];
	}
	return tot;
}

VolumeTotals volume_pass(const Mesh& m, const SingularExponent& s, int layers, bool parallel) {
	std::vector<VolAcc> per_tri(m.triangle_count());
	if (parallel) {
		par::for_each(m.triangle_count(),
		              [&](std::ptrdiff_t t) { per_tri[t] = dual_tri_contrib(m, static_cast<int>(t), s, layers); });
	} else {
		for (int t = 0; t < m.triangle_count(); ++t)
			per_tri[t] = dual_tri_contrib(m, t, s, layers);
	}
	return reduce_contribs(m, per_tri);
}

std::vector<int> corner_triangles(const Mesh& m) {
	std::vector<int> out;
	if (m.origin_vertex < 0)
		return out;
	for (int t = 0; t < m.triangle_count(); ++t) {
		const Tri& T = m.triangles[t];
		if (T.v[0] == m.origin_vertex || T.v[1] == m.origin_vertex ||
		    T.v[2] == m.origin_vertex)
			out.push_back(t);
	}
	return out;
}

SingularVolume volume_impl(const Mesh& m, const SingularExponent& s, int layers,
                           double rel_check, bool parallel) {
	if (layers < 2)
		throw std::invalid_argument("singular_volume: need at least 2 layers");

	VolumeTotals base = volume_pass(m, s, layers, parallel);

	// re-run only the corner triangles with twice the layers; the change
	// bounds the layering error of the scheme
	SingularVolume out;
	const std::vector<int> corner = corner_triangles(m);
	if (!corner.empty()) {
		double dn = 0.0, dp_sq = 0.0, p_sq = 0.0;
		VolumeTotals refined = base;
		for (int t : corner) {
			const VolAcc a1 = dual_tri_contrib(m, t, s, layers);
			const VolAcc a2 = dual_tri_contrib(m, t, s, 2 * layers);
			refined.norm_sq += a2.norm - a1.norm;
			for (int i = 0; i < 3; ++i)
				refined.pairing[m.triangles[t].v[i]] += a2.pair[i] - a1.pair[i];
		}
		dn = std::abs(refined.norm_sq - base.norm_sq) / std::abs(refined.norm_sq);
		for (int x = 0; x < m.vertex_count(); ++x) {
			const double d = refined.pairing[x] - base.pairing[x];
			dp_sq += d * d;
			p_sq += refined.pairing[x] * refined.pairing[x];
		}
		const double dp = p_sq > 0.0 ? std::sqrt(dp_sq / p_sq) : 0.0;
		out.check_rel_change = std::max(dn, dp);
		if (out.check_rel_change > rel_check) {
			std::ostringstream os;
			os << "singular_volume: layer-doubling check failed, relative change "
			   << out.check_rel_change << " exceeds " << rel_check;
			throw std::runtime_error(os.str());
		}
		base = std::move(refined);
	}
	out.norm_sq = base.norm_sq;
	out.hat_pairing = std::move(base.pairing);
	return out;
}

} // namespace

SingularVolume singular_volume(const Mesh& m, const SingularExponent& s, int layers,
                               double rel_check) {
	return volume_impl(m, s, layers, rel_check, true);
}

namespace reference {
SingularVolume singular_volume(const Mesh& m, const SingularExponent& s, int layers) {
	return volume_impl(m, s, layers, 1e-6, false);
}
} // namespace reference

std::pair<double, double> volume_inner_products(const Mesh& m, const NodalField& field,
                                                const SingularExponent& s, int layers) {
	if (static_cast<int>(field.values.size()) != m.vertex_count())
		throw std::invalid_argument("volume_inner_products: field/mesh mismatch");
	const SingularVolume sv = singular_volume(m, s, layers);
	double dot_fs = 0.0;
	for (int x = 0; x < m.vertex_count(); ++x)
		dot_fs += field.values[x] * sv.hat_pairing[x];
	return {dot_fs, sv.norm_sq};
}

double volume_pairing_primal(const Mesh& m, const std::function<double(Vec2)>& f,
                             const SingularExponent& s, int layers) {
	const auto subtri = [&](Vec2 a, Vec2 b, Vec2 c) {
		const double area = 0.5 * cross(b - a, c - a);
		double acc = 0.0;
		for (const TriQuadPoint& q : tri_rule_degree6()) {
			const Vec2 x = q.b0 * a + q.b1 * b + q.b2 * c;
			acc += q.w * area * f(x) * eval_primal(s, x);
		}
		return acc;
	};

	std::vector<double> per_tri(m.triangle_count(), 0.0);
	par::for_each(m.triangle_count(), [&](std::ptrdiff_t ti) {
		const int t = static_cast<int>(ti);
		const Tri& T = m.triangles[t];
		const Vec2 p[3] = {m.vertices[T.v[0]], m.vertices[T.v[1]], m.vertices[T.v[2]]};
		int oi = -1;
		for (int i = 0; i < 3; ++i)
			if (T.v[i] == m.origin_vertex)
				oi = i;
		double acc = 0.0;
		if (oi < 0) {
			double r_min = norm(p[0]);
			for (int i = 1; i < 3; ++i)
				r_min = std::min(r_min, norm(p[i]));
			const int depth = subdivision_depth(triangle_diameter(m, t), r_min);
			quadrisect(p[0], p[1], p[2], depth,
			           [&](Vec2 a, Vec2 b, Vec2 c) { acc += subtri(a, b, c); });
		} else {
			const Vec2 A = p[(oi + 1) % 3];
			const Vec2 B = p[(oi + 2) % 3];
			for (int k = 0; k < layers; ++k) {
				const double so = std::ldexp(1.0, -k);
				const double si = 0.5 * so;
				quadrisect(si * A, so * A, so * B, 2,
				           [&](Vec2 a, Vec2 b, Vec2 c) { acc += subtri(a, b, c); });
				quadrisect(si * A, so * B, si * B, 2,
				           [&](Vec2 a, Vec2 b, Vec2 c) { acc += subtri(a, b, c); });
			}
			// apex: r^lambda decays toward the corner, so freezing f at the
			// apex centroid leaves an O(se^(2+lambda)) remainder
			const double se = std::ldexp(1.0, -layers);
			const Vec2 Ae = se * A, Be = se * B;
			const ConeGeometry cone(Ae, Be);
			const double fc = f((1.0 / 3.0) * (Ae + Be));
			double apex = 0.0;
			angular_gauss(cone, [&](double theta, double w, double R) {
				apex += w * std::sin(s.lambda * theta) *
				        std::pow(R, 2.0 + s.lambda) / (2.0 + s.lambda);
			});
			acc += fc * apex;
		}
		per_tri[t] = acc;
	});

	double total = 0.0;
	for (double v : per_tri)
		total += v;
	return total;
}

double boundary_singular_pairing(const Mesh& m, const std::function<double(Vec2)>& u,
                                 const SingularExponent& s, double h_q, double R,
                                 double mu_q) {
	if (!(h_q > 0.0))
		throw std::invalid_argument("boundary_singular_pairing: h_q must be positive");
	if (!(R > 0.0))
		throw std::invalid_argument("boundary_singular_pairing: R must be positive");
	if (mu_q <= 0.0)
		mu_q = std::min(1.0, 2.0 * std::numbers::pi / m.omega - 1.0);
	if (mu_q > 1.0)
		throw std::invalid_argument("boundary_singular_pairing: mu_q must lie in (0, 1]");
	if (m.segments.empty())
		throw std::invalid_argument("boundary_singular_pairing: mesh has no boundary segments");

	double total = 0.0;
	for (const BoundarySegment& seg : m.segments) {
		const bool from_origin = seg.from.x == 0.0 && seg.from.y == 0.0;
		const bool to_origin = seg.to.x == 0.0 && seg.to.y == 0.0;
		// parametrize from the corner when the segment is one of its rays
		const Vec2 base = to_origin ? seg.to : seg.from;
		const Vec2 tip = to_origin ? seg.from : seg.to;
		const double L = norm(tip - base);
		const Vec2 dir = (1.0 / L) * (tip - base);

		auto add_piece = [&](double a, double b) {
			const Vec2 mid = base + (0.5 * (a + b)) * dir;
			total += (b - a) * u(mid) * normal_derivative_primal(s, mid, seg.normal);
		};

		if (from_origin || to_origin) {
			const double graded_end = std::min(R, L);
			double x = std::max(std::pow(h_q, 1.0 / mu_q), 1e-300);
			x = std::min(x, graded_end);
			add_piece(0.0, x);
			while (x < graded_end) {
				const double next = std::min(x + h_q * std::pow(x, 1.0 - mu_q), graded_end);
				add_piece(x, next);
				x = next;
			}
			if (L > graded_end) {
				const int n = std::max(1, static_cast<int>(std::ceil((L - graded_end) / h_q)));
				const double w = (L - graded_end) / n;
				for (int k = 0; k < n; ++k)
					add_piece(graded_end + k * w, graded_end + (k + 1) * w);
			}
		} else {
			const int n = std::max(1, static_cast<int>(std::ceil(L / h_q)));
			const double w = L / n;
			for (int k = 0; k < n; ++k)
				add_piece(k * w, (k + 1) * w);
		}
	}
	return total;
}

} // namespace cornerfem
