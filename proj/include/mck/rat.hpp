#pragma once

#include <gmpxx.h>
#include <string>

namespace mck {

// Exact rational scalar. Always canonical (lowest terms, positive denominator);
// gmp keeps the invariant for us.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1)
{
	Rat q(num, den);
	q.canonicalize();
	return q;
}

inline std::string to_string(const Rat& q) { return q.get_str(); }

inline bool is_zero(const Rat& q) { return sgn(q) == 0; }

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

// binom(a, k) for rational a: a(a-1)...(a-k+1)/k!
inline Rat binom(const Rat& a, int k)
{
	Rat r = 1;
	for (int i = 0; i < k; ++i)
		r *= (a - i) / (i + 1);
	return r;
}

inline Rat factorial(int n)
{
	Rat r = 1;
	for (int i = 2; i <= n; ++i)
		r *= i;
	return r;
}

} // namespace mck
