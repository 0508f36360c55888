#pragma once

// Independent rank oracles for the Hilbert-scheme pipelines. Kept apart from
// the engine on purpose: plain integer series arithmetic, no Chow machinery.

#include <vector>

namespace oracle {

// Goettsche's product formula specialised to a surface with even cohomology
// ranks (1, m, 1): the generating series of the Poincare polynomials of the
// Hilbert schemes is
//   prod_{k>=1} (1 - z^{2k-2} q^k)^{-1} (1 - z^{2k} q^k)^{-m} (1 - z^{2k+2} q^k)^{-1}.
// Returns the ranks of Hilb^n by codimension (z^2 <-> one codimension step).
inline std::vector<long long> hilb_ranks(int m, int n)
{
	int zmax = 4 * n + 1;
	// series[k][z]: coefficient of q^k z^z
	std::vector<std::vector<long long>> series(n + 1, std::vector<long long>(zmax + 1));
	series[0][0] = 1;
	auto mul_inv_factor = [&](int a, int k) {
		// multiply by (1 - z^a q^k)^{-1} = sum_j z^{aj} q^{kj}
		std::vector<std::vector<long long>> out(n + 1, std::vector<long long>(zmax + 1));
		for (int q0 = 0; q0 <= n; ++q0)
			for (int z0 = 0; z0 <= zmax; ++z0) {
				long long c = series[q0][z0];
				if (!c)
					continue;
				for (int j = 0; q0 + j * k <= n; ++j) {
					int z = z0 + a * j;
					if (z <= zmax)
						out[q0 + j * k][z] += c;
				}
			}
		series = std::move(out);
	};
	for (int k = 1; k <= n; ++k) {
		mul_inv_factor(2 * k - 2, k);
		for (int i = 0; i < m; ++i)
			mul_inv_factor(2 * k, k);
		mul_inv_factor(2 * k + 2, k);
	}
	std::vector<long long> ranks(2 * n + 1);
	for (int p = 0; p <= 2 * n; ++p)
		ranks[p] = series[n][2 * p];
	return ranks;
}

inline std::vector<long long> convolve(const std::vector<long long>& a,
                                       const std::vector<long long>& b)
{
	std::vector<long long> r(a.size() + b.size() - 1);
	for (size_t i = 0; i < a.size(); ++i)
		for (size_t j = 0; j < b.size(); ++j)
			r[i + j] += a[i] * b[j];
	return r;
}

inline std::vector<long long> shifted(const std::vector<long long>& a, int by, size_t len)
{
	std::vector<long long> r(len);
	for (size_t i = 0; i < a.size(); ++i)
		if (i + by < len)
			r[i + by] += a[i];
	return r;
}

// Blow-up bookkeeping for the nested Hilbert schemes of a surface with
// ranks (1, m, 1): X^[1,2] = Bl_Delta(X x X), X^[2,3] = Bl_{X^[1,2]}(X x X^[2]).
inline std::vector<long long> nested12_ranks(int m)
{
	std::vector<long long> surf{1, m, 1};
	auto xx = convolve(surf, surf);
	auto r = xx;
	auto sh = shifted(surf, 1, r.size());
	for (size_t i = 0; i < r.size(); ++i)
		r[i] += sh[i];
	return r;
}

inline std::vector<long long> nested23_ranks(int m)
{
	std::vector<long long> surf{1, m, 1};
	auto r = convolve(surf, hilb_ranks(m, 2));
	auto sh = shifted(nested12_ranks(m), 1, r.size());
	for (size_t i = 0; i < r.size(); ++i)
		r[i] += sh[i];
	return r;
}

} // namespace oracle
