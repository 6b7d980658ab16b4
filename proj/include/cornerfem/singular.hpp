#pragma once

#include <functional>
#include <vector>

#include "cornerfem/fields.hpp"
#include "cornerfem/mesh.hpp"

namespace cornerfem {

// Corner exponent lambda = pi/omega of the domain with opening angle omega.
// For re-entrant corners (omega > pi) lambda lies in (1/2, 1).
struct SingularExponent {
	double omega = 0.0;
	double lambda = 0.0;
	explicit SingularExponent(double omega_);
};

// s+ = r^lambda * sin(lambda*theta), finite everywhere
double eval_primal(const SingularExponent& s, Vec2 p);
Vec2 grad_primal(const SingularExponent& s, Vec2 p);

// s- = r^(-lambda) * sin(lambda*theta); throws at the origin
double eval_dual(const SingularExponent& s, Vec2 p);

// n . grad s+ at a boundary point with outward normal n
double normal_derivative_primal(const SingularExponent& s, Vec2 p, Vec2 outward_normal);

// Volume integrals against the dual singular function:
//   norm_sq       = |s-|^2 over Omega,
//   hat_pairing_x = (hat_x, s-) over Omega.
// Triangles touching the corner are split into `layers` geometric layers
// (ratio 1/2 toward the apex) integrated by a degree-6 rule; the apex piece
// is integrated exactly in the radial direction with Gauss in the angle, so
// no truncation is left at the corner. Each call verifies that doubling the
// layer count moves the results by less than rel_check and throws otherwise.
struct SingularVolume {
	double norm_sq = 0.0;
	std::vector<double> hat_pairing;
	double check_rel_change = 0.0;
};

SingularVolume singular_volume(const Mesh& m, const SingularExponent& s, int layers = 16,
                               double rel_check = 1e-6);

namespace reference {
SingularVolume singular_volume(const Mesh& m, const SingularExponent& s, int layers = 16);
} // namespace reference

// ((field, s-), |s-|^2) using singular_volume
std::pair<double, double> volume_inner_products(const Mesh& m, const NodalField& field,
                                                const SingularExponent& s, int layers = 16);

// (f, s+) over Omega with the same corner layering (f smooth)
double volume_pairing_primal(const Mesh& m, const std::function<double(Vec2)>& f,
                             const SingularExponent& s, int layers = 16);

// (u, dn s+)_Gamma by a composite midpoint rule on a boundary partition
// graded toward the corner inside radius R: element sizes h_q * r^(1-mu_q),
// starting at h_q^(1/mu_q); uniform size h_q elsewhere. mu_q <= 0 selects the
// default 2*pi/omega - 1.
double boundary_singular_pairing(const Mesh& m, const std::function<double(Vec2)>& u,
                                 const SingularExponent& s, double h_q, double R = 0.1,
                                 double mu_q = -1.0);

} // namespace cornerfem
