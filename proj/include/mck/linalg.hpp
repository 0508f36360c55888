#pragma once

#include "mck/rat.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mck {

// Sparse vector over Q: sorted unique indices, no explicit zeros.
struct SparseVec {
	std::vector<std::pair<int, Rat>> t;

	SparseVec() = default;
	static SparseVec unit(int i, Rat c = 1)
	{
		SparseVec v;
		if (!is_zero(c))
			v.t.emplace_back(i, std::move(c));
		return v;
	}

	bool empty() const { return t.empty(); }
	size_t size() const { return t.size(); }

	Rat at(int i) const
	{
		for (auto& [k, c] : t)
			if (k == i)
				return c;
		return Rat(0);
	}

	void add_term(int i, const Rat& c); // keeps sorted/canonical
	SparseVec& operator+=(const SparseVec& o);
	SparseVec& operator-=(const SparseVec& o);
	SparseVec& operator*=(const Rat& c);
	friend SparseVec operator+(SparseVec a, const SparseVec& b) { return a += b; }
	friend SparseVec operator-(SparseVec a, const SparseVec& b) { return a -= b; }
	friend SparseVec operator*(SparseVec a, const Rat& c) { return a *= c; }
	friend SparseVec operator*(const Rat& c, SparseVec a) { return a *= c; }
	SparseVec operator-() const;
	bool operator==(const SparseVec& o) const { return t == o.t; }
};

// Dense matrix over Q, row major. Sizes in this engine stay small (<= a few
// hundred), so dense exact elimination is the simplest correct tool.
struct Mat {
	int nr = 0, nc = 0;
	std::vector<Rat> a;

	Mat() = default;
	Mat(int r, int c) : nr(r), nc(c), a(size_t(r) * c) {}
	static Mat identity(int n);

	Rat& at(int i, int j) { return a[size_t(i) * nc + j]; }
	const Rat& at(int i, int j) const { return a[size_t(i) * nc + j]; }

	bool is_zero() const;
	bool operator==(const Mat& o) const { return nr == o.nr && nc == o.nc && a == o.a; }

	Mat transposed() const;
	Mat& operator+=(const Mat& o);
	Mat& operator-=(const Mat& o);
	Mat& operator*=(const Rat& c);
	friend Mat operator+(Mat x, const Mat& y) { return x += y; }
	friend Mat operator-(Mat x, const Mat& y) { return x -= y; }
	friend Mat operator*(Mat x, const Rat& c) { return x *= c; }
	friend Mat operator*(const Rat& c, Mat x) { return x *= c; }

	SparseVec row_sparse(int i) const;
	SparseVec col_sparse(int j) const;
	void set_row(int i, const SparseVec& v);
};

Mat mat_mul(const Mat& A, const Mat& B);
SparseVec mat_apply(const Mat& A, const SparseVec& x); // A * x (x indexed by columns)
Rat trace(const Mat& A);

// Exact Gauss elimination utilities.
int rank(Mat A);
Mat inverse(const Mat& A);                   // throws if singular
bool try_inverse(const Mat& A, Mat& out);
// Solve A x = b; returns false if inconsistent. Free variables are set to 0.
bool solve(const Mat& A, const SparseVec& b, SparseVec& x);
// Reduced row echelon basis of the row space of A (deterministic).
std::vector<SparseVec> row_space_basis(const Mat& A);

} // namespace mck
