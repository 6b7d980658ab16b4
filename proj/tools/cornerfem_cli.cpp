#include "cornerfem/mesh.hpp"
#include "cornerfem/study.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

namespace {

using namespace cornerfem;

struct SolveArgs {
	double omega_deg = 270.0;
	std::string method = "standard";
	double mu = 1.0;
	int levels = 5;
	std::string regularization = "l2proj";
	double datum_exponent = 0.4999;
	double grading_c1 = 0.125;
	double grading_c2 = 1.0;
	std::string out;
};

ExperimentConfig to_config(const SolveArgs& a) {
	ExperimentConfig cfg;
	cfg.omega_deg = a.omega_deg;
	cfg.method = a.method == "standard" ? Method::standard
	             : a.method == "graded" ? Method::graded
	                                    : Method::dscm;
	cfg.mu = a.mu;
	cfg.levels = a.levels;
	cfg.regularization =
	    a.regularization == "carstensen" ? Regularization::carstensen : Regularization::l2proj;
	cfg.datum_exponent = a.datum_exponent;
	cfg.grading_c1 = a.grading_c1;
	cfg.grading_c2 = a.grading_c2;
	cfg.out_path = a.out;
	return cfg;
}

void print_report(const ExperimentReport& rep) {
	write_report_csv(std::cout, rep);
	std::cout << std::flush;
}

int run_solve(const SolveArgs& a) {
	const ExperimentReport rep = run_experiment(to_config(a));
	print_report(rep);
	if (!a.out.empty())
		std::cerr << "wrote " << a.out << "\n";
	return 0;
}

int run_mesh(double omega_deg, double mu, int levels, const std::string& out) {
	const double omega = omega_deg * std::numbers::pi / 180.0;
	Mesh m;
	if (mu > 0.0) {
		GradingParams gp;
		gp.mu = mu;
		const double h = 0.5 * std::ldexp(1.0, -(levels - 1));
		gp.h = h;
		const int sweep_limit = std::max(200, static_cast<int>(3.0 / mu * std::log2(1.0 / h)) + 200);
		m = refine_to_graded(build_initial_mesh(omega), gp, sweep_limit);
	} else {
		m = build_initial_mesh(omega);
		for (int r = 0; r < 4 + 2 * (levels - 1); ++r)
			m = bisect_all(m);
	}
	std::ofstream os(out, std::ios::trunc);
	if (!os)
		throw std::runtime_error("cannot write " + out);
	write_mesh(os, m);
	std::cerr << "wrote " << out << " (" << m.vertex_count() << " vertices, " << m.triangle_count()
	          << " triangles)\n";
	return 0;
}

int run_tables(const std::string& preset, const std::string& out_dir) {
	if (preset != "all")
		throw std::runtime_error("unknown preset '" + preset + "' (available: all)");

	struct Entry {
		const char* name;
		double omega_deg;
		Method method;
		double mu;
		int levels;
		double c2;
	};
	const Entry matrix[] = {
	    {"omega270_standard.csv", 270.0, Method::standard, 1.0, 7, 1.0},
	    {"omega270_dscm.csv", 270.0, Method::dscm, 1.0, 7, 1.0},
	    {"omega270_graded_mu0.666.csv", 270.0, Method::graded, 0.666, 7, 1.0},
	    {"omega270_graded_mu0.5.csv", 270.0, Method::graded, 0.5, 7, 1.0},
	    {"omega270_graded_mu0.333.csv", 270.0, Method::graded, 0.333, 7, 1.0},
	    {"omega355_standard.csv", 355.0, Method::standard, 1.0, 7, 1.0},
	    {"omega355_dscm.csv", 355.0, Method::dscm, 1.0, 7, 1.0},
	    {"omega355_graded_mu0.014085.csv", 355.0, Method::graded, 0.014085, 7, 4.0},
	};

	for (const Entry& e : matrix) {
		ExperimentConfig cfg;
		cfg.omega_deg = e.omega_deg;
		cfg.method = e.method;
		cfg.mu = e.mu;
		cfg.levels = e.levels;
		cfg.grading_c2 = e.c2;
		cfg.out_path = out_dir + "/" + e.name;
		std::cerr << "running " << e.name << " ..." << std::endl;
		const ExperimentReport rep = run_experiment(cfg);
		std::cerr << "  done in " << rep.wall_seconds << " s, finest error "
		          << rep.rows.back().error << "\n";
	}
	std::cerr << "wrote " << sizeof(matrix) / sizeof(matrix[0]) << " tables to " << out_dir << "/\n";
	return 0;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"P1 finite elements for the Poisson equation with L2 Dirichlet data on "
	             "pacman domains: graded meshes and the dual singular complement method"};
	app.require_subcommand(1);
	app.set_config("--config", "", "read options from a key = value file (flags win)");

	SolveArgs sa;
	CLI::App* solve = app.add_subcommand("solve", "run a convergence study, write a CSV report");
	solve->add_option("--omega", sa.omega_deg, "interior angle in degrees")
	    ->required()
	    ->check(CLI::Range(1e-6, 360.0 - 1e-6));
	solve->add_option("--method", sa.method, "discretization method")
	    ->required()
	    ->check(CLI::IsMember({"standard", "graded", "dscm"}));
	solve->add_option("--mu", sa.mu, "grading exponent (graded method)")->check(CLI::Range(1e-9, 1.0));
	solve->add_option("--levels", sa.levels, "refinement levels")->required()->check(CLI::Range(2, 64));
	solve->add_option("--regularization", sa.regularization, "boundary datum regularization")
	    ->check(CLI::IsMember({"l2proj", "carstensen"}));
	solve->add_option("--datum-exponent", sa.datum_exponent, "exponent a of the datum r^-a sin(-a theta)")
	    ->check(CLI::Range(1e-6, 1.0 - 1e-6));
	solve->add_option("--grading-c1", sa.grading_c1, "lower grading constant");
	solve->add_option("--grading-c2", sa.grading_c2, "upper grading constant");
	solve->add_option("--out", sa.out, "CSV output path")->required();

	double m_omega = 270.0, m_mu = 0.0;
	int m_levels = 3;
	std::string m_out;
	CLI::App* mesh = app.add_subcommand("mesh", "build a mesh and export it as text");
	mesh->add_option("--omega", m_omega, "interior angle in degrees")
	    ->required()
	    ->check(CLI::Range(1e-6, 360.0 - 1e-6));
	mesh->add_option("--mu", m_mu, "grading exponent; omit for uniform bisection")
	    ->check(CLI::Range(1e-9, 1.0));
	mesh->add_option("--levels", m_levels, "ladder level to build")->required()->check(CLI::Range(1, 64));
	mesh->add_option("--out", m_out, "mesh output path")->required();

	std::string t_preset = "all", t_out_dir = "tables";
	CLI::App* tables = app.add_subcommand("tables", "run a full experiment matrix");
	tables->add_option("--preset", t_preset, "experiment matrix to run")->required();
	tables->add_option("--out-dir", t_out_dir, "directory for the CSV files (must exist)");

	CLI11_PARSE(app, argc, argv);

	try {
		if (solve->parsed())
			return run_solve(sa);
		if (mesh->parsed())
			return run_mesh(m_omega, m_mu, m_levels, m_out);
		return run_tables(t_preset, t_out_dir);
	} catch (const std::exception& ex) {
		std::cerr << "error: " << ex.what() << "\n";
		return 1;
	}
}
