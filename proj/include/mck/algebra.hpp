#pragma once

#include "mck/linalg.hpp"
#include "mck/report.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mck {

// Finite graded commutative Q-algebra with a chosen basis, a multiplication
// table, and a degree functional supported in the top codimension. This is the
// engine's model of the Chow ring of a variety with finite-rank Chow groups.
struct GradedAlgebra {
	int top = 0; // top codimension
	std::vector<std::string> names;
	std::vector<int> codim;
	int unit = 0;
	std::vector<std::vector<SparseVec>> table; // table[i][j] = b_i * b_j
	SparseVec degree_functional;               // coefficients on codim-top basis elements

	// caches, built by finalize()
	std::vector<std::vector<int>> slots; // basis indices per codimension
	Mat gram;                            // gram(i,j) = deg(b_i b_j)
	Mat gram_inv;

	int dim() const { return int(names.size()); }

	SparseVec mul(const SparseVec& a, const SparseVec& b) const;
	SparseVec mul_basis(int i, int j) const { return table[i][j]; }
	Rat degree(const SparseVec& a) const;
	Rat pair(const SparseVec& a, const SparseVec& b) const { return degree(mul(a, b)); }
	SparseVec dual_of_basis(int i) const { return gram_inv.row_sparse(i); }
	// Poincare-dual basis of the codim-p slot, aligned with slots[p].
	std::vector<SparseVec> dual_basis(int p) const;

	SparseVec component(const SparseVec& a, int p) const; // codim-p part
	bool is_homogeneous(const SparseVec& a, int p) const;

	// Builds caches; throws if the pairing is not perfect in every codimension.
	void finalize();

	Report verify_axioms(bool check_associativity) const;
};

using AlgP = std::shared_ptr<const GradedAlgebra>;

// A class in a graded algebra. Thin value wrapper so intersection-theory code
// reads like formulas.
struct Cls {
	const GradedAlgebra* A = nullptr;
	SparseVec v;

	Cls() = default;
	Cls(const GradedAlgebra* alg, SparseVec vec) : A(alg), v(std::move(vec)) {}

	static Cls zero(const GradedAlgebra* A) { return {A, {}}; }
	static Cls one(const GradedAlgebra* A) { return {A, SparseVec::unit(A->unit)}; }
	static Cls basis(const GradedAlgebra* A, int i) { return {A, SparseVec::unit(i)}; }

	bool is_zero() const { return v.empty(); }
	Rat deg() const { return A->degree(v); }
	Cls part(int p) const { return {A, A->component(v, p)}; }

	Cls& operator+=(const Cls& o);
	Cls& operator-=(const Cls& o);
	friend Cls operator+(Cls a, const Cls& b) { return a += b; }
	friend Cls operator-(Cls a, const Cls& b) { return a -= b; }
	friend Cls operator*(const Cls& a, const Cls& b);
	friend Cls operator*(Cls a, const Rat& c) { a.v *= c; return a; }
	friend Cls operator*(const Rat& c, Cls a) { a.v *= c; return a; }
	Cls operator-() const { return {A, -v}; }
	bool operator==(const Cls& o) const { return v == o.v; }

	Cls pow(int k) const;
};

// --- truncated characteristic-class series calculus ----------------------
//
// A total characteristic class is a Cls whose codim-0 part is the unit
// (Chern, Segre, Todd) or the rank (Chern character). Everything is truncated
// at the ambient top codimension.

Cls series_invert(const Cls& s); // requires codim-0 part == 1
Cls chern_character(const Rat& rank, const Cls& total_chern);
Cls chern_from_character(const Cls& ch); // total Chern class from ch
Cls todd(const Cls& total_chern);
Cls todd_inverse_of_line(const Cls& c1); // (1 - e^{-x})/x for a line class x
Cls exp_class(const Cls& c1);            // e^x = ch of a line bundle
Cls dual_chern(const Cls& c);            // c_k -> (-1)^k c_k
Cls dual_character(const Cls& ch);       // ch_k -> (-1)^k ch_k
// Total Chern class of E (x) L for a line bundle L with first Chern class x.
Cls chern_twist_line(const Cls& chern_E, int rank_E, const Cls& x);

// (1+x)^a for a nilpotent class x (positive-codim part only).
Cls nilpotent_binomial(const Cls& x, const Rat& a);

} // namespace mck
