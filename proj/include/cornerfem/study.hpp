#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cornerfem/dscm.hpp"
#include "cornerfem/fields.hpp"
#include "cornerfem/mesh.hpp"

namespace cornerfem {

// |exact - solution|_{L2} by a degree-4 rule per triangle; triangles touching
// the corner are split into `depth` geometric layers (ratio 1/2). Doubling
// the depth must move the result by less than 1e-5 relative or the call
// throws. The DSCM overload includes delta * r^(-lambda)sin(lambda theta).
double l2_error(const NodalField& y_h, const std::function<double(Vec2)>& exact, int depth = 16);
double l2_error(const DscmSolution& z_h, const std::function<double(Vec2)>& exact, int depth = 16);

namespace reference {
double l2_error(const NodalField& y_h, const std::function<double(Vec2)>& exact, int depth = 16);
} // namespace reference

// eoc_i = ln(e_{i-1}/e_i) / ln(sqrt(N_i/N_{i-1})), one value per refinement
// step (element i describes the step from row i to row i+1). Throws on
// non-positive errors or counts.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<long>& unknowns);

enum class Method { standard, graded, dscm };
enum class Regularization { l2proj, carstensen };

struct ExperimentConfig {
	double omega_deg = 270.0;
	Method method = Method::standard;
	double mu = 1.0; // grading exponent, graded method only
	int levels = 8;
	Regularization regularization = Regularization::l2proj;
	double datum_exponent = 0.4999;
	double solver_tol = 1e-10;
	int volume_layers = 16;
	int error_depth = 16;
	double pairing_R = 0.1;
	// mesh ladder controls
	int base_rounds = 4;
	int rounds_per_level = 2;
	double h0 = 0.5;
	double grading_c1 = 0.125;
	double grading_c2 = 1.0;
	std::string out_path; // empty: no CSV written
};

struct LevelRow {
	long unknowns = 0;
	double error = 0.0;
	std::optional<double> eoc;
};

struct ExperimentReport {
	ExperimentConfig config;
	std::vector<LevelRow> rows;
	double wall_seconds = 0.0;
};

// Runs the boundary-datum problem u = y = r^(-a) sin(-a theta), f = 0 over a
// mesh ladder (uniform bisection for standard/dscm, refine_to_graded per
// level for graded) and reports unknowns, L2 errors and EOCs. Rows are
// flushed to out_path as they complete so partial reports survive failures.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// header `unknowns,error,eoc`, eoc blank on the first row; config echoed in
// leading comment lines
void write_report_csv(std::ostream& os, const ExperimentReport& report);

} // namespace cornerfem
