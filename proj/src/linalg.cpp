#include "mck/linalg.hpp"

#include <algorithm>

namespace mck {

void SparseVec::add_term(int i, const Rat& c)
{
	if (is_zero(c))
		return;
	auto it = std::lower_bound(t.begin(), t.end(), i,
	                           [](const auto& p, int k) { return p.first < k; });
	if (it != t.end() && it->first == i) {
		it->second += c;
		if (is_zero(it->second))
			t.erase(it);
	} else {
		t.insert(it, {i, c});
	}
}

SparseVec& SparseVec::operator+=(const SparseVec& o)
{
	if (o.t.empty())
		return *this;
	std::vector<std::pair<int, Rat>> r;
	r.reserve(t.size() + o.t.size());
	size_t i = 0, j = 0;
	while (i < t.size() || j < o.t.size()) {
		if (j == o.t.size() || (i < t.size() && t[i].first < o.t[j].first)) {
			r.push_back(t[i++]);
		} else if (i == t.size() || o.t[j].first < t[i].first) {
			r.push_back(o.t[j++]);
		} else {
			Rat c = t[i].second + o.t[j].second;
			if (!is_zero(c))
				r.emplace_back(t[i].first, std::move(c));
			++i, ++j;
		}
	}
	t = std::move(r);
	return *this;
}

SparseVec& SparseVec::operator-=(const SparseVec& o) { return *this += -o; }

SparseVec SparseVec::operator-() const
{
	SparseVec r = *this;
	for (auto& [i, c] : r.t)
		c = -c;
	return r;
}

SparseVec& SparseVec::operator*=(const Rat& c)
{
	if (is_zero(c)) {
		t.clear();
		return *this;
	}
	for (auto& [i, v] : t)
		v *= c;
	return *this;
}

Mat Mat::identity(int n)
{
	Mat m(n, n);
	for (int i = 0; i < n; ++i)
		m.at(i, i) = 1;
	return m;
}

bool Mat::is_zero() const
{
	for (auto& x : a)
		if (!mck::is_zero(x))
			return false;
	return true;
}

Mat Mat::transposed() const
{
	Mat m(nc, nr);
	for (int i = 0; i < nr; ++i)
		for (int j = 0; j < nc; ++j)
			if (!mck::is_zero(at(i, j)))
				m.at(j, i) = at(i, j);
	return m;
}

Mat& Mat::operator+=(const Mat& o)
{
	if (nr != o.nr || nc != o.nc)
		throw std::invalid_argument("Mat+: shape mismatch");
	for (size_t k = 0; k < a.size(); ++k)
		a[k] += o.a[k];
	return *this;
}

Mat& Mat::operator-=(const Mat& o)
{
	if (nr != o.nr || nc != o.nc)
		throw std::invalid_argument("Mat-: shape mismatch");
	for (size_t k = 0; k < a.size(); ++k)
		a[k] -= o.a[k];
	return *this;
}

Mat& Mat::operator*=(const Rat& c)
{
	for (auto& x : a)
		x *= c;
	return *this;
}

SparseVec Mat::row_sparse(int i) const
{
	SparseVec v;
	for (int j = 0; j < nc; ++j)
		if (!mck::is_zero(at(i, j)))
			v.t.emplace_back(j, at(i, j));
	return v;
}

SparseVec Mat::col_sparse(int j) const
{
	SparseVec v;
	for (int i = 0; i < nr; ++i)
		if (!mck::is_zero(at(i, j)))
			v.t.emplace_back(i, at(i, j));
	return v;
}

void Mat::set_row(int i, const SparseVec& v)
{
	for (int j = 0; j < nc; ++j)
		at(i, j) = 0;
	for (auto& [j, c] : v.t)
		at(i, j) = c;
}

Mat mat_mul(const Mat& A, const Mat& B)
{
	if (A.nc != B.nr)
		throw std::invalid_argument("mat_mul: shape mismatch");
	Mat C(A.nr, B.nc);
	for (int i = 0; i < A.nr; ++i)
		for (int k = 0; k < A.nc; ++k) {
			const Rat& x = A.at(i, k);
			if (is_zero(x))
				continue;
			for (int j = 0; j < B.nc; ++j) {
				const Rat& y = B.at(k, j);
				if (!is_zero(y))
					C.at(i, j) += x * y;
			}
		}
	return C;
}

SparseVec mat_apply(const Mat& A, const SparseVec& x)
{
	SparseVec r;
	std::vector<Rat> acc(A.nr);
	for (auto& [j, c] : x.t) {
		if (j >= A.nc)
			throw std::invalid_argument("mat_apply: index out of range");
		for (int i = 0; i < A.nr; ++i) {
			const Rat& y = A.at(i, j);
			if (!is_zero(y))
				acc[i] += y * c;
		}
	}
	for (int i = 0; i < A.nr; ++i)
		if (!is_zero(acc[i]))
			r.t.emplace_back(i, acc[i]);
	return r;
}

Rat trace(const Mat& A)
{
	Rat s = 0;
	for (int i = 0; i < std::min(A.nr, A.nc); ++i)
		s += A.at(i, i);
	return s;
}

namespace {

// In-place forward elimination to reduced row echelon form.
// Returns the pivot column of each pivot row.
std::vector<int> rref(Mat& M)
{
	std::vector<int> pivots;
	int row = 0;
	for (int col = 0; col < M.nc && row < M.nr; ++col) {
		int p = -1;
		for (int i = row; i < M.nr; ++i)
			if (!is_zero(M.at(i, col))) {
				p = i;
				break;
			}
		if (p < 0)
			continue;
		if (p != row)
			for (int j = 0; j < M.nc; ++j)
				std::swap(M.at(p, j), M.at(row, j));
		Rat inv = 1 / M.at(row, col);
		for (int j = col; j < M.nc; ++j)
			M.at(row, j) *= inv;
		for (int i = 0; i < M.nr; ++i) {
			if (i == row)
				continue;
			Rat f = M.at(i, col);
			if (is_zero(f))
				continue;
			for (int j = col; j < M.nc; ++j)
				M.at(i, j) -= f * M.at(row, j);
		}
		pivots.push_back(col);
		++row;
	}
	return pivots;
}

} // namespace

int rank(Mat A)
{
	return int(rref(A).size());
}

bool try_inverse(const Mat& A, Mat& out)
{
	if (A.nr != A.nc)
		return false;
	int n = A.nr;
	Mat M(n, 2 * n);
	for (int i = 0; i < n; ++i) {
		for (int j = 0; j < n; ++j)
			M.at(i, j) = A.at(i, j);
		M.at(i, n + i) = 1;
	}
	auto piv = rref(M);
	if (int(piv.size()) != n || piv.back() != n - 1)
		return false;
	out = Mat(n, n);
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j)
			out.at(i, j) = M.at(i, n + j);
	return true;
}

Mat inverse(const Mat& A)
{
	Mat out;
	if (!try_inverse(A, out))
		throw std::domain_error("inverse: singular matrix");
	return out;
}

bool solve(const Mat& A, const SparseVec& b, SparseVec& x)
{
	Mat M(A.nr, A.nc + 1);
	for (int i = 0; i < A.nr; ++i)
		for (int j = 0; j < A.nc; ++j)
			M.at(i, j) = A.at(i, j);
	for (auto& [i, c] : b.t)
		M.at(i, A.nc) = c;
	auto piv = rref(M);
	x = SparseVec{};
	for (size_t r = 0; r < piv.size(); ++r) {
		if (piv[r] == A.nc)
			return false; // pivot in augmented column: inconsistent
		x.add_term(piv[r], M.at(int(r), A.nc));
	}
	return true;
}

std::vector<SparseVec> row_space_basis(const Mat& A)
{
	Mat M = A;
	auto piv = rref(M);
	std::vector<SparseVec> basis;
	for (size_t r = 0; r < piv.size(); ++r)
		basis.push_back(M.row_sparse(int(r)));
	return basis;
}

} // namespace mck
