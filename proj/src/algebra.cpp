#include "mck/algebra.hpp"

#include <fmt/format.h>

namespace mck {

SparseVec GradedAlgebra::mul(const SparseVec& a, const SparseVec& b) const
{
	SparseVec r;
	for (auto& [i, ci] : a.t)
		for (auto& [j, cj] : b.t) {
			Rat c = ci * cj;
			for (auto& [k, ck] : table[i][j].t)
				r.add_term(k, c * ck);
		}
	return r;
}

Rat GradedAlgebra::degree(const SparseVec& a) const
{
	Rat s = 0;
	for (auto& [i, c] : a.t)
		s += c * degree_functional.at(i);
	return s;
}

std::vector<SparseVec> GradedAlgebra::dual_basis(int p) const
{
	std::vector<SparseVec> d;
	for (int i : slots[p])
		d.push_back(dual_of_basis(i));
	return d;
}

SparseVec GradedAlgebra::component(const SparseVec& a, int p) const
{
	SparseVec r;
	for (auto& [i, c] : a.t)
		if (codim[i] == p)
			r.t.emplace_back(i, c);
	return r;
}

bool GradedAlgebra::is_homogeneous(const SparseVec& a, int p) const
{
	for (auto& [i, c] : a.t)
		if (codim[i] != p)
			return false;
	return true;
}

void GradedAlgebra::finalize()
{
	slots.assign(top + 1, {});
	for (int i = 0; i < dim(); ++i) {
		if (codim[i] < 0 || codim[i] > top)
			throw std::invalid_argument("algebra: basis codim out of range");
		slots[codim[i]].push_back(i);
	}
	gram = Mat(dim(), dim());
	for (int i = 0; i < dim(); ++i)
		for (int j = i; j < dim(); ++j) {
			if (codim[i] + codim[j] != top)
				continue;
			Rat d = degree(table[i][j]);
			gram.at(i, j) = d;
			gram.at(j, i) = d;
		}
	if (!try_inverse(gram, gram_inv))
		throw std::domain_error(fmt::format("algebra '{}': pairing is not perfect",
	                                        names.empty() ? "" : names[0]));
}

Report GradedAlgebra::verify_axioms(bool check_associativity) const
{
	Report rep;
	int n = dim();

	bool ok = true;
	std::string w;
	for (int i = 0; i < n && ok; ++i)
		for (int j = 0; j < n && ok; ++j)
			if (!(table[i][j] == table[j][i])) {
				ok = false;
				w = fmt::format("{}*{} != {}*{}", names[i], names[j], names[j], names[i]);
			}
	rep.add("algebra.commutative", ok, w);

	ok = true;
	w.clear();
	for (int i = 0; i < n && ok; ++i)
		if (!(table[unit][i] == SparseVec::unit(i))) {
			ok = false;
			w = fmt::format("1*{} != {}", names[i], names[i]);
		}
	rep.add("algebra.unit", ok, w);

	ok = true;
	w.clear();
	for (int i = 0; i < n && ok; ++i)
		for (int j = 0; j < n && ok; ++j) {
			int p = codim[i] + codim[j];
			for (auto& [k, c] : table[i][j].t)
				if (codim[k] != p) {
					ok = false;
					w = fmt::format("{}*{} has a component off codim {}", names[i],
					                names[j], p);
					break;
				}
		}
	rep.add("algebra.graded", ok, w);

	ok = true;
	w.clear();
	for (auto& [i, c] : degree_functional.t)
		if (codim[i] != top) {
			ok = false;
			w = fmt::format("degree functional touches {} of codim {}", names[i], codim[i]);
		}
	rep.add("algebra.degree_support", ok, w);

	ok = true;
	w.clear();
	for (int p = 0; p <= top && ok; ++p) {
		auto& lo = slots[p];
		auto& hi = slots[top - p];
		if (lo.size() != hi.size()) {
			ok = false;
			w = fmt::format("rank asymmetry between codim {} and {}", p, top - p);
			break;
		}
		Mat block(int(lo.size()), int(hi.size()));
		for (size_t a = 0; a < lo.size(); ++a)
			for (size_t b = 0; b < hi.size(); ++b)
				block.at(int(a), int(b)) = gram.at(lo[a], hi[b]);
		Mat dummy;
		if (!try_inverse(block, dummy)) {
			ok = false;
			w = fmt::format("pairing degenerate at codim {}", p);
		}
	}
	rep.add("algebra.perfect_pairing", ok, w);

	if (check_associativity) {
		ok = true;
		w.clear();
		for (int i = 0; i < n && ok; ++i)
			for (int j = i; j < n && ok; ++j) {
				SparseVec ij = table[i][j];
				for (int k = j; k < n; ++k) {
					if (codim[i] + codim[j] + codim[k] > top)
						continue;
					SparseVec lhs = mul(ij, SparseVec::unit(k));
					SparseVec rhs = mul(SparseVec::unit(i), table[j][k]);
					if (!(lhs == rhs)) {
						ok = false;
						w = fmt::format("({}*{})*{} != {}*({}*{})", names[i], names[j],
						                names[k], names[i], names[j], names[k]);
						break;
					}
				}
			}
		rep.add("algebra.associative", ok, w);
	}
	return rep;
}

Cls& Cls::operator+=(const Cls& o)
{
	if (A != o.A)
		throw std::invalid_argument("Cls: mixed algebras");
	v += o.v;
	return *this;
}

Cls& Cls::operator-=(const Cls& o)
{
	if (A != o.A)
		throw std::invalid_argument("Cls: mixed algebras");
	v -= o.v;
	return *this;
}

Cls operator*(const Cls& a, const Cls& b)
{
	if (a.A != b.A)
		throw std::invalid_argument("Cls: mixed algebras");
	return {a.A, a.A->mul(a.v, b.v)};
}

Cls Cls::pow(int k) const
{
	Cls r = Cls::one(A);
	for (int i = 0; i < k; ++i)
		r = r * (*this);
	return r;
}

Cls series_invert(const Cls& s)
{
	const GradedAlgebra* A = s.A;
	if (!(s.part(0) == Cls::one(A)))
		throw std::domain_error("series_invert: leading term is not 1");
	std::vector<Cls> inv(A->top + 1, Cls::zero(A));
	inv[0] = Cls::one(A);
	Cls total = inv[0];
	for (int m = 1; m <= A->top; ++m) {
		Cls acc = Cls::zero(A);
		for (int j = 1; j <= m; ++j)
			acc += s.part(j) * inv[m - j];
		inv[m] = -acc;
		total += inv[m];
	}
	return total;
}

namespace {

// Power sums of the Chern roots from the total Chern class (Newton).
std::vector<Cls> power_sums(const Cls& c)
{
	const GradedAlgebra* A = c.A;
	int D = A->top;
	std::vector<Cls> p(D + 1, Cls::zero(A));
	for (int k = 1; k <= D; ++k) {
		Cls acc = Rat((k % 2 == 0) ? -k : k) * c.part(k);
		for (int i = 1; i < k; ++i) {
			Cls t = c.part(i) * p[k - i];
			acc += (i % 2 == 0) ? -t : t;
		}
		p[k] = acc;
	}
	return p;
}

Cls exp_nilpotent(const Cls& x)
{
	const GradedAlgebra* A = x.A;
	Cls r = Cls::one(A);
	Cls term = Cls::one(A);
	for (int k = 1; k <= A->top; ++k) {
		term = term * x * (Rat(1) / k);
		if (term.is_zero())
			break;
		r += term;
	}
	return r;
}

// Coefficients of log(x / (1 - e^{-x})) as a univariate series up to x^n.
std::vector<Rat> log_todd_series(int n)
{
	// d(x) = (1 - e^{-x}) / x = sum (-1)^k x^k / (k+1)!
	std::vector<Rat> d(n + 1);
	for (int k = 0; k <= n; ++k)
		d[k] = Rat((k % 2) ? -1 : 1) / factorial(k + 1);
	// f = 1/d
	std::vector<Rat> f(n + 1);
	f[0] = 1;
	for (int m = 1; m <= n; ++m) {
		Rat acc = 0;
		for (int j = 1; j <= m; ++j)
			acc += d[j] * f[m - j];
		f[m] = -acc;
	}
	// log f with u = f - 1
	std::vector<Rat> u = f;
	u[0] = 0;
	std::vector<Rat> pw = u, lg(n + 1);
	for (int m = 1; m <= n; ++m) {
		Rat sign = (m % 2) ? 1 : -1;
		for (int k = 0; k <= n; ++k)
			lg[k] += sign / m * pw[k];
		// pw *= u
		std::vector<Rat> nx(n + 1);
		for (int a = 0; a <= n; ++a)
			for (int b = 0; a + b <= n; ++b)
				nx[a + b] += pw[a] * u[b];
		pw = nx;
	}
	return lg;
}

} // namespace

Cls chern_character(const Rat& rank, const Cls& total_chern)
{
	const GradedAlgebra* A = total_chern.A;
	auto p = power_sums(total_chern);
	Cls ch = rank * Cls::one(A);
	for (int k = 1; k <= A->top; ++k)
		ch += p[k] * (Rat(1) / factorial(k));
	return ch;
}

Cls chern_from_character(const Cls& ch)
{
	const GradedAlgebra* A = ch.A;
	int D = A->top;
	std::vector<Cls> p(D + 1, Cls::zero(A)), c(D + 1, Cls::zero(A));
	for (int k = 1; k <= D; ++k)
		p[k] = factorial(k) * ch.part(k);
	c[0] = Cls::one(A);
	Cls total = c[0];
	for (int k = 1; k <= D; ++k) {
		Cls acc = Cls::zero(A);
		for (int i = 1; i <= k; ++i) {
			Cls t = c[k - i] * p[i];
			acc += (i % 2) ? t : -t;
		}
		c[k] = acc * (Rat(1) / k);
		total += c[k];
	}
	return total;
}

Cls todd(const Cls& total_chern)
{
	const GradedAlgebra* A = total_chern.A;
	auto p = power_sums(total_chern);
	auto lambda = log_todd_series(A->top);
	Cls L = Cls::zero(A);
	for (int k = 1; k <= A->top; ++k)
		L += lambda[k] * p[k];
	return exp_nilpotent(L);
}

Cls todd_inverse_of_line(const Cls& x)
{
	const GradedAlgebra* A = x.A;
	Cls r = Cls::zero(A);
	Cls pw = Cls::one(A);
	for (int k = 0; k <= A->top; ++k) {
		r += pw * (Rat((k % 2) ? -1 : 1) / factorial(k + 1));
		pw = pw * x;
		if (pw.is_zero())
			break;
	}
	return r;
}

Cls exp_class(const Cls& c1) { return exp_nilpotent(c1); }

Cls dual_chern(const Cls& c)
{
	Cls r = Cls::zero(c.A);
	for (int k = 0; k <= c.A->top; ++k) {
		Cls t = c.part(k);
		r += (k % 2) ? -t : t;
	}
	return r;
}

Cls dual_character(const Cls& ch) { return dual_chern(ch); }

Cls chern_twist_line(const Cls& chern_E, int rank_E, const Cls& x)
{
	const GradedAlgebra* A = chern_E.A;
	Cls r = Cls::zero(A);
	for (int k = 0; k <= A->top; ++k) {
		Cls ck = Cls::zero(A);
		for (int j = 0; j <= k; ++j)
			ck += binom(Rat(rank_E - j), k - j) * chern_E.part(j) * x.pow(k - j);
		r += ck.part(k);
	}
	return r;
}

Cls nilpotent_binomial(const Cls& x, const Rat& a)
{
	const GradedAlgebra* A = x.A;
	if (!x.part(0).is_zero())
		throw std::domain_error("nilpotent_binomial: class has a codim-0 part");
	Cls r = Cls::one(A);
	Cls pw = Cls::one(A);
	for (int k = 1; k <= A->top; ++k) {
		pw = pw * x;
		if (pw.is_zero())
			break;
		r += binom(a, k) * pw;
	}
	return r;
}

} // namespace mck
