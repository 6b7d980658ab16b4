#pragma once

#include <functional>
#include <iosfwd>

#include "cornerfem/fem.hpp"
#include "cornerfem/fields.hpp"
#include "cornerfem/singular.hpp"
#include "cornerfem/trace.hpp"

namespace cornerfem {

// Discrete dual singular function p_s^h = p_tilde + r^(-lambda)sin(lambda theta),
// where p_tilde = p_star - r_h, p_star solves the homogeneous problem driven
// by the lifting r_h of the dual trace (zero at the corner vertex).
struct DualSingularComplement {
	NodalField r_h;
	NodalField p_star;
	NodalField p_tilde;
	double lambda = 0.0;
	double norm_ps_h_sq = 0.0; // |p_s^h|^2 in L2(Omega)
	// pieces reused by the coefficient formulas
	std::vector<double> hat_pairing; // (hat_x, s-)
	double sing_norm_sq = 0.0;       // |s-|^2
};

DualSingularComplement build_complement(const Mesh& m, const SingularExponent& s,
                                        double tol = 1e-10, int layers = 16);

// beta_h = |p_s^h|^2 / pi
double compute_beta(const DualSingularComplement& c);

// phi_tilde = phi_star - beta_h * s_h with phi_star the interior solve whose
// load is (p_s^h, v_h) + beta_h (grad s_h, grad v_h); s_h lifts the primal
// singular function.
NodalField build_phi(const Mesh& m, const DualSingularComplement& c, double beta_h,
                     const SingularExponent& s, double tol = 1e-10);

// gamma_h = (y_h, p_s^h) / |p_s^h|^2
double compute_gamma(const NodalField& y_h, const DualSingularComplement& c,
                     const SparseMatrix& mass);

// alpha_h = [ (B u^h, p_s^h) - (grad B u^h, grad phi_tilde)
//             - beta_h (u, dn s+)_Gamma + (f, phi_s^h) ] / |p_s^h|^2
// with B u^h the lifting of the regularized trace and u the raw datum.
double compute_alpha(const Mesh& m, const std::function<double(Vec2)>& u,
                     const TraceField& u_trace, const ScalarFn& f,
                     const DualSingularComplement& c, double beta_h, const NodalField& phi_tilde,
                     const SingularExponent& s, const SparseMatrix& stiffness,
                     const SparseMatrix& mass, double pairing_h_q, double pairing_R = 0.1);

// z_h = z_tilde + delta * r^(-lambda)sin(lambda theta), delta = alpha - gamma
struct DscmSolution {
	NodalField z_tilde;
	double lambda = 0.0;
	double delta = 0.0;
	double alpha = 0.0;
	double gamma = 0.0;
	double beta = 0.0;
};

struct DscmOptions {
	double tol = 1e-10;
	int layers = 16;
	double pairing_R = 0.1;
	double pairing_h_q = 0.0; // <= 0 selects mesh_h(m)
	bool carstensen = false;  // trace regularization choice
};

// Full pipeline on a quasi-uniform mesh: regularize u, solve, build the
// complement, correct by delta * p_s^h.
DscmSolution dscm_solve(const Mesh& m, const std::function<double(Vec2)>& u, const ScalarFn& f,
                        const SingularExponent& s, const DscmOptions& opt = {});

// coefficients plus scalars in the mesh module's text conventions
void write_solution(std::ostream& os, const DscmSolution& z);
DscmSolution read_solution(std::istream& is, const Mesh& m);

} // namespace cornerfem
