#include "cornerfem/sparse.hpp"

#include "cornerfem/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace cornerfem {

void SparseMatrix::add(int i, int j, double v) {
	for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
		if (col[k] == j) {
			val[k] += v;
			return;
		}
	}
	throw std::logic_error("SparseMatrix::add: entry outside the pattern");
}

double SparseMatrix::get(int i, int j) const {
	for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
		if (col[k] == j)
			return val[k];
	return 0.0;
}

std::vector<double> matvec(const SparseMatrix& A, std::span<const double> x) {
	if (static_cast<int>(x.size()) != A.n)
		throw std::invalid_argument("matvec: size mismatch");
	std::vector<double> y(A.n, 0.0);
	par::for_each(A.n, [&](std::ptrdiff_t i) {
		double s = 0.0;
		for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
			s += A.val[k] * x[A.col[k]];
		y[i] = s;
	});
	return y;
}

SparseMatrix restrict_to(const SparseMatrix& A, const std::vector<int>& keep) {
	std::vector<int> dense(A.n, -1);
	for (std::size_t i = 0; i < keep.size(); ++i) {
		if (keep[i] < 0 || keep[i] >= A.n)
			throw std::invalid_argument("restrict_to: index out of range");
		if (dense[keep[i]] >= 0)
			throw std::invalid_argument("restrict_to: duplicate index");
		dense[keep[i]] = static_cast<int>(i);
	}
	SparseMatrix B;
	B.n = static_cast<int>(keep.size());
	B.row_ptr.assign(B.n + 1, 0);
	for (int bi = 0; bi < B.n; ++bi) {
		const int i = keep[bi];
		for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
			if (dense[A.col[k]] >= 0)
				B.row_ptr[bi + 1]++;
	}
	for (int bi = 0; bi < B.n; ++bi)
		B.row_ptr[bi + 1] += B.row_ptr[bi];
	B.col.resize(B.row_ptr[B.n]);
	B.val.resize(B.row_ptr[B.n]);
	for (int bi = 0; bi < B.n; ++bi) {
		const int i = keep[bi];
		int w = B.row_ptr[bi];
		for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
			const int bj = dense[A.col[k]];
			if (bj >= 0) {
				B.col[w] = bj;
				B.val[w] = A.val[k];
				++w;
			}
		}
	}
	return B;
}

void write_coo(std::ostream& os, const SparseMatrix& A) {
	os << std::setprecision(17);
	for (int i = 0; i < A.n; ++i)
		for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
			os << i << " " << A.col[k] << " " << A.val[k] << "\n";
}

namespace {

double ddot(std::span<const double> a, std::span<const double> b) {
	return par::sum(static_cast<std::ptrdiff_t>(a.size()),
	                [&](std::ptrdiff_t i) { return a[i] * b[i]; });
}

double dnorm(std::span<const double> a) { return std::sqrt(ddot(a, a)); }

} // namespace

CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, double tol, int maxit) {
	if (static_cast<int>(b.size()) != A.n)
		throw std::invalid_argument("cg_solve: size mismatch");
	const int n = A.n;
	if (maxit < 0)
		maxit = 10 * n;

	CgResult res;
	res.x.assign(n, 0.0);
	const double bnorm = dnorm(b);
	if (bnorm == 0.0) {
		res.converged = true;
		return res;
	}

	std::vector<double> inv_diag(n);
	for (int i = 0; i < n; ++i) {
		const double d = A.get(i, i);
		if (!(d > 0.0))
			throw std::runtime_error("cg_solve: non-positive diagonal entry");
		inv_diag[i] = 1.0 / d;
	}

	std::vector<double> r(b.begin(), b.end());
	std::vector<double> z(n), p(n), Ap;
	par::for_each(n, [&](std::ptrdiff_t i) { z[i] = inv_diag[i] * r[i]; });
	p = z;
	double rz = ddot(r, z);

	for (int it = 1; it <= maxit; ++it) {
		Ap = matvec(A, p);
		const double pAp = ddot(p, Ap);
		if (!(pAp > 0.0))
			throw std::runtime_error("cg_solve: matrix is not positive definite");
		const double alpha = rz / pAp;
		par::for_each(n, [&](std::ptrdiff_t i) {
			res.x[i] += alpha * p[i];
			r[i] -= alpha * Ap[i];
		});
		res.iterations = it;

		if (dnorm(r) <= tol * bnorm) {
			// recurrence residual can drift; confirm against the true one
			std::vector<double> Ax = matvec(A, res.x);
			par::for_each(n, [&](std::ptrdiff_t i) { r[i] = b[i] - Ax[i]; });
			const double true_rel = dnorm(r) / bnorm;
			if (true_rel <= tol) {
				res.relative_residual = true_rel;
				res.converged = true;
				return res;
			}
		}

		par::for_each(n, [&](std::ptrdiff_t i) { z[i] = inv_diag[i] * r[i]; });
		const double rz_next = ddot(r, z);
		const double beta = rz_next / rz;
		rz = rz_next;
		par::for_each(n, [&](std::ptrdiff_t i) { p[i] = z[i] + beta * p[i]; });
	}

	std::vector<double> Ax = matvec(A, res.x);
	par::for_each(n, [&](std::ptrdiff_t i) { r[i] = b[i] - Ax[i]; });
	res.relative_residual = dnorm(r) / bnorm;
	res.converged = res.relative_residual <= tol;
	return res;
}

std::vector<double> envelope_cholesky_solve(const SparseMatrix& A, const std::vector<int>& order,
                                            std::span<const double> b, std::size_t max_profile) {
	const int n = A.n;
	if (static_cast<int>(b.size()) != n || static_cast<int>(order.size()) != n)
		throw std::invalid_argument("envelope_cholesky_solve: size mismatch");
	std::vector<int> pos(n, -1);
	for (int i = 0; i < n; ++i) {
		if (order[i] < 0 || order[i] >= n || pos[order[i]] >= 0)
			throw std::invalid_argument("envelope_cholesky_solve: order is not a permutation");
		pos[order[i]] = i;
	}

	// first[i] = leftmost column of permuted row i; the factor fills the
	// whole envelope [first[i], i], nothing outside it
	std::vector<int> first(n);
	for (int i = 0; i < n; ++i) {
		int lo = i;
		const int oi = order[i];
		for (int k = A.row_ptr[oi]; k < A.row_ptr[oi + 1]; ++k)
			lo = std::min(lo, pos[A.col[k]]);
		first[i] = lo;
	}
	std::vector<std::size_t> start(n + 1, 0);
	for (int i = 0; i < n; ++i)
		start[i + 1] = start[i] + static_cast<std::size_t>(i - first[i] + 1);
	if (start[n] > max_profile)
		throw std::runtime_error("envelope_cholesky_solve: envelope exceeds the size cap");

	std::vector<double> L(start[n], 0.0);
	auto at = [&](int i, int j) -> double& { return L[start[i] + (j - first[i])]; };
	for (int i = 0; i < n; ++i) {
		const int oi = order[i];
		for (int k = A.row_ptr[oi]; k < A.row_ptr[oi + 1]; ++k) {
			const int j = pos[A.col[k]];
			if (j <= i)
				at(i, j) = A.val[k];
		}
	}

	for (int i = 0; i < n; ++i) {
		for (int j = first[i]; j <= i; ++j) {
			double s = at(i, j);
			const int lo = std::max(first[i], first[j]);
			for (int k = lo; k < j; ++k)
				s -= at(i, k) * at(j, k);
			if (j < i) {
				at(i, j) = s / at(j, j);
			} else {
				if (!(s > 0.0))
					throw std::runtime_error("envelope_cholesky_solve: nonpositive pivot");
				at(i, i) = std::sqrt(s);
			}
		}
	}

	std::vector<double> y(n);
	for (int i = 0; i < n; ++i) {
		double s = b[order[i]];
		for (int k = first[i]; k < i; ++k)
			s -= at(i, k) * y[k];
		y[i] = s / at(i, i);
	}
	for (int i = n - 1; i >= 0; --i) {
		y[i] /= at(i, i);
		const double yi = y[i];
		for (int k = first[i]; k < i; ++k)
			y[k] -= at(i, k) * yi;
	}
	std::vector<double> x(n);
	for (int i = 0; i < n; ++i)
		x[order[i]] = y[i];
	return x;
}

} // namespace cornerfem
