#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace cornerfem {

// Symmetric sparse matrix in CSR form, both triangles stored.
struct SparseMatrix {
	int n = 0;
	std::vector<int> row_ptr; // size n+1
	std::vector<int> col;
	std::vector<double> val;

	// adds into an existing pattern entry; the entry must exist
	void add(int i, int j, double v);
	double get(int i, int j) const; // 0 when outside the pattern
};

std::vector<double> matvec(const SparseMatrix& A, std::span<const double> x);

// Rows/columns listed in `keep` extracted into a dense-indexed submatrix.
SparseMatrix restrict_to(const SparseMatrix& A, const std::vector<int>& keep);

// coordinate text format, one `i j value` line per stored entry
void write_coo(std::ostream& os, const SparseMatrix& A);

struct CgResult {
	std::vector<double> x;
	int iterations = 0;
	double relative_residual = 0.0;
	bool converged = false;
};

// Conjugate gradients with Jacobi preconditioning. Stops when the true
// residual satisfies |b - Ax| <= tol * |b|; maxit < 0 means 10*n. A zero
// right-hand side returns x = 0 after 0 iterations.
CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, double tol = 1e-10,
                  int maxit = -1);

// Direct SPD solve by envelope (skyline) Cholesky under the elimination order
// `order` (a permutation of 0..n-1); returns x in the original indexing.
// Unlike norm-based iteration this stays componentwise accurate when the
// solution spans hundreds of orders of magnitude, provided `order` places
// coupled unknowns of similar scale next to each other. Throws when the
// envelope exceeds `max_profile` entries or a pivot fails.
std::vector<double> envelope_cholesky_solve(const SparseMatrix& A, const std::vector<int>& order,
                                            std::span<const double> b,
                                            std::size_t max_profile = std::size_t(1) << 26);

} // namespace cornerfem
