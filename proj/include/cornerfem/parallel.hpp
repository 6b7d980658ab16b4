#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cornerfem::par {

// Parallel kernels in this library follow one pattern: independent work per
// item written to disjoint slots (parallelizable in any order), followed by a
// serial reduction in item order. Results are therefore identical for every
// thread count, including 1.

inline int max_threads() {
#ifdef _OPENMP
	return omp_get_max_threads();
#else
	return 1;
#endif
}

template <class Fn>
void for_each(std::ptrdiff_t n, Fn&& fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
	for (std::ptrdiff_t i = 0; i < n; ++i)
		fn(i);
#else
	for (std::ptrdiff_t i = 0; i < n; ++i)
		fn(i);
#endif
}

// Deterministic sum of fn(0..n-1): fixed-size blocks are accumulated in
// parallel, block partials are added in block order.
template <class Fn>
double sum(std::ptrdiff_t n, Fn&& fn) {
	constexpr std::ptrdiff_t block = 4096;
	const std::ptrdiff_t nblocks = (n + block - 1) / block;
	std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
	for_each(nblocks, [&](std::ptrdiff_t b) {
		const std::ptrdiff_t lo = b * block;
		const std::ptrdiff_t hi = lo + block < n ? lo + block : n;
		double s = 0.0;
		for (std::ptrdiff_t i = lo; i < hi; ++i)
			s += fn(i);
		partial[static_cast<std::size_t>(b)] = s;
	});
	double total = 0.0;
	for (double p : partial)
		total += p;
	return total;
}

} // namespace cornerfem::par
