#include "cornerfem/dscm.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cornerfem {

namespace {

// boundary values of r^(-lambda)sin(lambda theta); the corner vertex takes 0,
// the trace limit along both adjacent rays
TraceField dual_trace(const Mesh& m, const SingularExponent& s) {
	TraceField tr;
	tr.mesh = &m;
	tr.values.resize(m.boundary_loop.size());
	for (std::size_t k = 0; k < m.boundary_loop.size(); ++k) {
		const int v = m.boundary_loop[k];
		tr.values[k] = v == m.origin_vertex ? 0.0 : eval_dual(s, m.vertices[v]);
	}
	return tr;
}

TraceField primal_trace(const Mesh& m, const SingularExponent& s) {
	TraceField tr;
	tr.mesh = &m;
	tr.values.resize(m.boundary_loop.size());
	for (std::size_t k = 0; k < m.boundary_loop.size(); ++k)
		tr.values[k] = eval_primal(s, m.vertices[m.boundary_loop[k]]);
	return tr;
}

// (p_s^h, hat_x) = (M p_tilde)_x + (hat_x, s-)
std::vector<double> ps_h_load(const DualSingularComplement& c, const SparseMatrix& mass) {
	std::vector<double> load = matvec(mass, c.p_tilde.values);
	for (std::size_t i = 0; i < load.size(); ++i)
		load[i] += c.hat_pairing[i];
	return load;
}

} // namespace

DualSingularComplement build_complement(const Mesh& m, const SingularExponent& s, double tol,
                                        int layers) {
	if (m.origin_vertex < 0)
		throw std::invalid_argument("build_complement: mesh has no vertex at the corner");

	DualSingularComplement c;
	c.lambda = s.lambda;
	const TraceField r_trace = dual_trace(m, s);
	c.r_h = lifting(m, r_trace);

	// p_tilde is the discrete harmonic extension of -r_h's boundary values,
	// so p_star = p_tilde + r_h vanishes on the boundary and satisfies
	// (grad p_star, grad v) = (grad r_h, grad v) for interior hats v
	const NodalField w = solve_poisson_dirichlet(m, nullptr, r_trace, tol);
	c.p_tilde = zero_field(m);
	c.p_star = zero_field(m);
	for (int i = 0; i < m.vertex_count(); ++i) {
		c.p_tilde.values[i] = -w.values[i];
		c.p_star.values[i] = c.p_tilde.values[i] + c.r_h.values[i];
	}

	const SingularVolume sv = singular_volume(m, s, layers);
	c.hat_pairing = sv.hat_pairing;
	c.sing_norm_sq = sv.norm_sq;

	const SparseMatrix mass = assemble_mass(m);
	const std::vector<double> Mp = matvec(mass, c.p_tilde.values);
	double pMp = 0.0, ps = 0.0;
	for (int i = 0; i < m.vertex_count(); ++i) {
		pMp += c.p_tilde.values[i] * Mp[i];
		ps += c.p_tilde.values[i] * c.hat_pairing[i];
	}
	c.norm_ps_h_sq = pMp + 2.0 * ps + c.sing_norm_sq;
	if (!(c.norm_ps_h_sq > 0.0))
		throw std::runtime_error("build_complement: nonpositive |p_s^h|^2");
	return c;
}

double compute_beta(const DualSingularComplement& c) {
	return c.norm_ps_h_sq / std::numbers::pi;
}

NodalField build_phi(const Mesh& m, const DualSingularComplement& c, double beta_h,
                     const SingularExponent& s, double tol) {
	const NodalField s_h = lifting(m, primal_trace(m, s));
	const SparseMatrix A = assemble_stiffness(m);
	const SparseMatrix M = assemble_mass(m);

	std::vector<double> load = ps_h_load(c, M);
	const std::vector<double> As = matvec(A, s_h.values);
	for (int i = 0; i < m.vertex_count(); ++i)
		load[i] += beta_h * As[i];

	const std::vector<int> interior = interior_vertices(m);
	std::vector<double> rhs(interior.size());
	for (std::size_t k = 0; k < interior.size(); ++k)
		rhs[k] = load[interior[k]];

	NodalField phi = zero_field(m);
	for (int i = 0; i < m.vertex_count(); ++i)
		phi.values[i] = -beta_h * s_h.values[i];
	if (!interior.empty()) {
		const CgResult r = cg_solve(restrict_to(A, interior), rhs, tol);
		if (!r.converged) {
			std::ostringstream os;
			os << "build_phi: cg stalled at relative residual " << r.relative_residual;
			throw std::runtime_error(os.str());
		}
		for (std::size_t k = 0; k < interior.size(); ++k)
			phi.values[interior[k]] += r.x[k];
	}
	return phi;
}

double compute_gamma(const NodalField& y_h, const DualSingularComplement& c,
                     const SparseMatrix& mass) {
	if (y_h.values.size() != c.p_tilde.values.size())
		throw std::invalid_argument("compute_gamma: field size mismatch");
	const std::vector<double> load = ps_h_load(c, mass);
	double num = 0.0;
	for (std::size_t i = 0; i < load.size(); ++i)
		num += y_h.values[i] * load[i];
	return num / c.norm_ps_h_sq;
}

double compute_alpha(const Mesh& m, const std::function<double(Vec2)>& u,
                     const TraceField& u_trace, const ScalarFn& f,
                     const DualSingularComplement& c, double beta_h, const NodalField& phi_tilde,
                     const SingularExponent& s, const SparseMatrix& stiffness,
                     const SparseMatrix& mass, double pairing_h_q, double pairing_R) {
	const NodalField Bu = lifting(m, u_trace);
	const std::vector<double> load = ps_h_load(c, mass);
	const std::vector<double> Aphi = matvec(stiffness, phi_tilde.values);

	double pair_ps = 0.0, grad = 0.0;
	for (int i = 0; i < m.vertex_count(); ++i) {
		pair_ps += Bu.values[i] * load[i];
		grad += Bu.values[i] * Aphi[i];
	}
	const double bnd = beta_h * boundary_singular_pairing(m, u, s, pairing_h_q, pairing_R);

	double src = 0.0;
	if (f) {
		const std::vector<double> lv = load_vector(m, f);
		for (int i = 0; i < m.vertex_count(); ++i)
			src += lv[i] * phi_tilde.values[i];
		src += beta_h * volume_pairing_primal(m, f, s);
	}
	return (pair_ps - grad - bnd + src) / c.norm_ps_h_sq;
}

DscmSolution dscm_solve(const Mesh& m, const std::function<double(Vec2)>& u, const ScalarFn& f,
                        const SingularExponent& s, const DscmOptions& opt) {
	const TraceField u_trace =
	    opt.carstensen ? carstensen_trace(m, u) : l2_project_trace(m, u);
	const NodalField y_h = solve_poisson_dirichlet(m, f, u_trace, opt.tol);

	const DualSingularComplement c = build_complement(m, s, opt.tol, opt.layers);
	const double beta = compute_beta(c);
	const NodalField phi = build_phi(m, c, beta, s, opt.tol);

	const SparseMatrix A = assemble_stiffness(m);
	const SparseMatrix M = assemble_mass(m);
	const double gamma = compute_gamma(y_h, c, M);
	const double h_q = opt.pairing_h_q > 0.0 ? opt.pairing_h_q : mesh_h(m);
	const double alpha =
	    compute_alpha(m, u, u_trace, f, c, beta, phi, s, A, M, h_q, opt.pairing_R);

	DscmSolution z;
	z.lambda = s.lambda;
	z.alpha = alpha;
	z.gamma = gamma;
	z.beta = beta;
	z.delta = alpha - gamma;
	z.z_tilde = zero_field(m);
	for (int i = 0; i < m.vertex_count(); ++i)
		z.z_tilde.values[i] = y_h.values[i] + z.delta * c.p_tilde.values[i];
	return z;
}

void write_solution(std::ostream& os, const DscmSolution& z) {
	os << "dscm_solution coefficients " << z.z_tilde.values.size() << "\n";
	os << std::setprecision(17);
	os << "lambda " << z.lambda << "\n";
	os << "delta " << z.delta << "\n";
	os << "alpha " << z.alpha << "\n";
	os << "gamma " << z.gamma << "\n";
	os << "beta " << z.beta << "\n";
	for (double v : z.z_tilde.values)
		os << v << "\n";
}

DscmSolution read_solution(std::istream& is, const Mesh& m) {
	std::string tag, word;
	std::size_t n = 0;
	if (!(is >> tag >> word >> n) || tag != "dscm_solution" || word != "coefficients")
		throw std::runtime_error("read_solution: bad header");
	if (n != static_cast<std::size_t>(m.vertex_count()))
		throw std::runtime_error("read_solution: coefficient count does not match the mesh");

	DscmSolution z;
	auto scalar = [&](const char* name) {
		double v = 0.0;
		if (!(is >> word >> v) || word != name)
			throw std::runtime_error(std::string("read_solution: expected field ") + name);
		return v;
	};
	z.lambda = scalar("lambda");
	z.delta = scalar("delta");
	z.alpha = scalar("alpha");
	z.gamma = scalar("gamma");
	z.beta = scalar("beta");

	z.z_tilde.mesh = &m;
	z.z_tilde.values.resize(n);
	for (std::size_t i = 0; i < n; ++i)
		if (!(is >> z.z_tilde.values[i]))
			throw std::runtime_error("read_solution: truncated coefficient list");
	return z;
}

} // namespace cornerfem
