#include "mck/corresp.hpp"

#include <fmt/format.h>

#include <map>

namespace mck {

bool Correspondence::operator==(const Correspondence& o) const
{
	return src == o.src && tgt == o.tgt && codim == o.codim && coeff == o.coeff;
}

Mat Correspondence::action_matrix() const
{
	return mat_mul(coeff.transposed(), src->alg()->gram);
}

Cls Correspondence::act(const Cls& a) const
{
	if (a.A != src->alg())
		throw std::invalid_argument("Correspondence::act: class on wrong variety");
	return {tgt->alg(), mat_apply(action_matrix(), a.v)};
}

Correspondence& Correspondence::operator+=(const Correspondence& o)
{
	if (src != o.src || tgt != o.tgt || codim != o.codim)
		throw std::invalid_argument("Correspondence+: type mismatch");
	coeff += o.coeff;
	return *this;
}

Correspondence& Correspondence::operator-=(const Correspondence& o)
{
	if (src != o.src || tgt != o.tgt || codim != o.codim)
		throw std::invalid_argument("Correspondence-: type mismatch");
	coeff -= o.coeff;
	return *this;
}

Correspondence& Correspondence::operator*=(const Rat& c)
{
	coeff *= c;
	return *this;
}

Correspondence make_correspondence(VarP src, VarP tgt, Mat coeff, int codim)
{
	const auto* S = src->alg();
	const auto* T = tgt->alg();
	if (coeff.nr != S->dim() || coeff.nc != T->dim())
		throw std::invalid_argument("make_correspondence: wrong shape");
	for (int i = 0; i < coeff.nr; ++i)
		for (int j = 0; j < coeff.nc; ++j)
			if (!is_zero(coeff.at(i, j)) && S->codim[i] + T->codim[j] != codim)
				throw std::invalid_argument(fmt::format(
				    "make_correspondence: entry ({},{}) off codim {}", S->names[i],
				    T->names[j], codim));
	return {std::move(src), std::move(tgt), codim, std::move(coeff)};
}

Correspondence corr_zero(VarP src, VarP tgt, int codim)
{
	Mat z(src->rank(), tgt->rank());
	return {std::move(src), std::move(tgt), codim, std::move(z)};
}

Correspondence corr_from_action(VarP src, VarP tgt, const Mat& action, int codim)
{
	Mat coeff = mat_mul(src->alg()->gram_inv, action.transposed());
	return make_correspondence(std::move(src), std::move(tgt), std::move(coeff), codim);
}

Correspondence identity_corr(VarP X)
{
	Mat coeff = X->alg()->gram_inv;
	int d = X->dim;
	return {X, X, d, std::move(coeff)};
}

Correspondence compose(const Correspondence& after, const Correspondence& before)
{
	if (before.tgt != after.src)
		throw std::invalid_argument("compose: middle variety mismatch");
	Mat coeff = mat_mul(before.coeff, mat_mul(before.tgt->alg()->gram, after.coeff));
	int codim = before.codim + after.codim - before.tgt->dim;
	return {before.src, after.tgt, codim, std::move(coeff)};
}

Correspondence transpose(const Correspondence& c)
{
	return {c.tgt, c.src, c.codim, c.coeff.transposed()};
}

Correspondence graph(const Morphism& f)
{
	return corr_from_action(f.source, f.target, f.pushforward_matrix(), f.target->dim);
}

Correspondence cograph(const Morphism& f)
{
	return transpose(graph(f));
}

Correspondence intersect_with(const Cls& a, VarP X)
{
	if (a.A != X->alg())
		throw std::invalid_argument("intersect_with: class on wrong variety");
	int p = -1;
	for (auto& [i, c] : a.v.t) {
		int ci = X->alg()->codim[i];
		if (p >= 0 && ci != p)
			throw std::invalid_argument("intersect_with: class must be homogeneous");
		p = ci;
	}
	if (p < 0)
		p = 0;
	Mat action(X->rank(), X->rank());
	for (int j = 0; j < X->rank(); ++j) {
		SparseVec col = X->alg()->mul(a.v, SparseVec::unit(j));
		for (auto& [i, c] : col.t)
			action.at(i, j) = c;
	}
	return corr_from_action(X, X, action, X->dim + p);
}

Correspondence corr_pow(const Correspondence& c, int k)
{
	if (c.src != c.tgt)
		throw std::invalid_argument("corr_pow: not a self-correspondence");
	Correspondence r = identity_corr(c.src);
	for (int i = 0; i < k; ++i)
		r = compose(c, r);
	return r;
}

Mat act_on_product_class(const Correspondence& A, const Correspondence& B, const Mat& cls)
{
	if (cls.nr != A.src->rank() || cls.nc != B.src->rank())
		throw std::invalid_argument("act_on_product_class: shape mismatch");
	return mat_mul(A.action_matrix(), mat_mul(cls, B.action_matrix().transposed()));
}

Correspondence tensor(const Correspondence& A, const Correspondence& B, const ProductData& src,
                      const ProductData& tgt)
{
	if (src.X != A.src || src.Y != B.src || tgt.X != A.tgt || tgt.Y != B.tgt)
		throw std::invalid_argument("tensor: product data mismatch");
	Mat coeff(src.V->rank(), tgt.V->rank());
	for (int i = 0; i < A.coeff.nr; ++i)
		for (int j = 0; j < A.coeff.nc; ++j) {
			const Rat& a = A.coeff.at(i, j);
			if (is_zero(a))
				continue;
			for (int k = 0; k < B.coeff.nr; ++k)
				for (int l = 0; l < B.coeff.nc; ++l) {
					const Rat& b = B.coeff.at(k, l);
					if (!is_zero(b))
						coeff.at(src.pair_index(i, k), tgt.pair_index(j, l)) = a * b;
				}
		}
	return {src.V, tgt.V, A.codim + B.codim, std::move(coeff)};
}

Tensor3 small_diagonal3(VarP X)
{
	const auto* A = X->alg();
	int n = A->dim();
	// T0_{abc} = deg(b_a b_b b_c), then G^{-1} applied in every slot
	Tensor3 t0;
	t0.A = A;
	for (int a = 0; a < n; ++a)
		for (int b = 0; b < n; ++b) {
			int rem = A->top - A->codim[a] - A->codim[b];
			if (rem < 0)
				continue;
			const SparseVec& ab = A->mul_basis(a, b);
			if (ab.empty())
				continue;
			for (int c : A->slots[rem]) {
				Rat d = 0;
				for (auto& [k, ck] : ab.t)
					d += ck * A->gram.at(k, c);
				if (!is_zero(d))
					t0.t.emplace_back(a, b, c, d);
			}
		}
	return apply3(A->gram_inv, A->gram_inv, A->gram_inv, t0, A);
}

Tensor3 apply3(const Mat& M1, const Mat& M2, const Mat& M3, const Tensor3& T,
               const GradedAlgebra* B)
{
	auto slot = [](const Mat& M, const Tensor3& in, int which, const GradedAlgebra* alg) {
		// contract one slot; accumulate via a map keyed by the new index triple
		std::vector<std::tuple<int, int, int, Rat>> out;
		std::map<std::tuple<int, int, int>, Rat> acc;
		for (auto& [a, b, c, v] : in.t) {
			int idx = which == 0 ? a : which == 1 ? b : c;
			SparseVec col = M.col_sparse(idx);
			for (auto& [p, m] : col.t) {
				auto key = std::tuple(which == 0 ? p : a, which == 1 ? p : b,
				                      which == 2 ? p : c);
				acc[key] += m * v;
			}
		}
		Tensor3 r;
		r.A = alg;
		for (auto& [k, v] : acc)
			if (!is_zero(v))
				r.t.emplace_back(std::get<0>(k), std::get<1>(k), std::get<2>(k), v);
		return r;
	};
	Tensor3 r = slot(M1, T, 0, B);
	r = slot(M2, r, 1, B);
	r = slot(M3, r, 2, B);
	return r;
}

Tensor3 mul3(const Tensor3& S, const Tensor3& T)
{
	if (S.A != T.A)
		throw std::invalid_argument("mul3: tensors over different algebras");
	const auto* A = S.A;
	std::map<std::tuple<int, int, int>, Rat> acc;
	for (auto& [a1, b1, c1, v1] : S.t)
		for (auto& [a2, b2, c2, v2] : T.t) {
			if (A->codim[a1] + A->codim[a2] > A->top || A->codim[b1] + A->codim[b2] > A->top ||
			    A->codim[c1] + A->codim[c2] > A->top)
				continue;
			const SparseVec& pa = A->mul_basis(a1, a2);
			if (pa.empty())
				continue;
			const SparseVec& pb = A->mul_basis(b1, b2);
			if (pb.empty())
				continue;
			const SparseVec& pc = A->mul_basis(c1, c2);
			if (pc.empty())
				continue;
			Rat v = v1 * v2;
			for (auto& [a, ca] : pa.t)
				for (auto& [b, cb] : pb.t) {
					Rat vab = v * ca * cb;
					for (auto& [c, cc] : pc.t)
						acc[{a, b, c}] += vab * cc;
				}
		}
	Tensor3 r;
	r.A = A;
	for (auto& [k, v] : acc)
		if (!is_zero(v))
			r.t.emplace_back(std::get<0>(k), std::get<1>(k), std::get<2>(k), v);
	return r;
}

Cls contract12(const Tensor3& T, const Cls& a, const Cls& b)
{
	const auto* A = T.A;
	if (a.A != A || b.A != A)
		throw std::invalid_argument("contract12: classes on wrong variety");
	SparseVec ga = mat_apply(A->gram, a.v);
	SparseVec gb = mat_apply(A->gram, b.v);
	SparseVec r;
	for (auto& [i, j, k, v] : T.t) {
		Rat c = v * ga.at(i) * gb.at(j);
		if (!is_zero(c))
			r.add_term(k, c);
	}
	return {A, r};
}

// --- blocks ---------------------------------------------------------------

BlockCorrespondence BlockCorrespondence::zero(MotiveSum src, MotiveSum tgt)
{
	BlockCorrespondence b;
	b.src = std::move(src);
	b.tgt = std::move(tgt);
	b.entry.assign(b.src.size(), std::vector<std::optional<Correspondence>>(b.tgt.size()));
	return b;
}

BlockCorrespondence BlockCorrespondence::identity(const MotiveSum& sum)
{
	auto b = zero(sum, sum);
	for (size_t s = 0; s < sum.size(); ++s)
		b.set(int(s), int(s), identity_corr(sum[s].V));
	return b;
}

int BlockCorrespondence::expected_codim(int s, int t) const
{
	return src[s].V->dim + src[s].twist - tgt[t].twist;
}

void BlockCorrespondence::set(int s, int t, Correspondence c)
{
	if (c.src != src[s].V || c.tgt != tgt[t].V)
		throw std::invalid_argument("block set: variety mismatch");
	if (c.codim != expected_codim(s, t))
		throw std::invalid_argument(fmt::format("block set: codim {} at ({},{}), expected {}",
		                                        c.codim, s, t, expected_codim(s, t)));
	entry[s][t] = std::move(c);
}

const Correspondence* BlockCorrespondence::get(int s, int t) const
{
	return entry[s][t] ? &*entry[s][t] : nullptr;
}

bool BlockCorrespondence::is_zero() const
{
	for (auto& row : entry)
		for (auto& e : row)
			if (e && !e->is_zero())
				return false;
	return true;
}

bool BlockCorrespondence::operator==(const BlockCorrespondence& o) const
{
	if (src.size() != o.src.size() || tgt.size() != o.tgt.size())
		return false;
	for (size_t s = 0; s < src.size(); ++s)
		for (size_t t = 0; t < tgt.size(); ++t) {
			const Correspondence* a = get(int(s), int(t));
			const Correspondence* b = o.get(int(s), int(t));
			bool za = !a || a->is_zero(), zb = !b || b->is_zero();
			if (za != zb)
				return false;
			if (!za && !(*a == *b))
				return false;
		}
	return true;
}

BlockCorrespondence& BlockCorrespondence::operator+=(const BlockCorrespondence& o)
{
	for (size_t s = 0; s < src.size(); ++s)
		for (size_t t = 0; t < tgt.size(); ++t) {
			const Correspondence* b = o.get(int(s), int(t));
			if (!b)
				continue;
			if (entry[s][t])
				*entry[s][t] += *b;
			else
				set(int(s), int(t), *b);
		}
	return *this;
}

BlockCorrespondence& BlockCorrespondence::operator-=(const BlockCorrespondence& o)
{
	for (size_t s = 0; s < src.size(); ++s)
		for (size_t t = 0; t < tgt.size(); ++t) {
			const Correspondence* b = o.get(int(s), int(t));
			if (!b)
				continue;
			if (entry[s][t])
				*entry[s][t] -= *b;
			else
				set(int(s), int(t), Rat(-1) * *b);
		}
	return *this;
}

BlockCorrespondence& BlockCorrespondence::operator*=(const Rat& c)
{
	for (auto& row : entry)
		for (auto& e : row)
			if (e)
				*e *= c;
	return *this;
}

BlockCorrespondence block_compose(const BlockCorrespondence& after,
                                  const BlockCorrespondence& before)
{
	auto r = BlockCorrespondence::zero(before.src, after.tgt);
	for (size_t s = 0; s < before.src.size(); ++s)
		for (size_t t = 0; t < after.tgt.size(); ++t) {
			std::optional<Correspondence> acc;
			for (size_t m = 0; m < before.tgt.size(); ++m) {
				const Correspondence* a = before.get(int(s), int(m));
				const Correspondence* b = after.get(int(m), int(t));
				if (!a || !b)
					continue;
				Correspondence c = compose(*b, *a);
				if (acc)
					*acc += c;
				else
					acc = std::move(c);
			}
			if (acc)
				r.set(int(s), int(t), std::move(*acc));
		}
	return r;
}

BlockCorrespondence block_transpose(const BlockCorrespondence& B, MotiveSum new_src,
                                    MotiveSum new_tgt)
{
	auto r = BlockCorrespondence::zero(std::move(new_src), std::move(new_tgt));
	if (r.src.size() != B.tgt.size() || r.tgt.size() != B.src.size())
		throw std::invalid_argument("block_transpose: shape mismatch");
	for (size_t s = 0; s < B.src.size(); ++s)
		for (size_t t = 0; t < B.tgt.size(); ++t)
			if (const Correspondence* e = B.get(int(s), int(t)))
				r.set(int(t), int(s), transpose(*e));
	return r;
}

BlockCorrespondence manin_dual(const BlockCorrespondence& B, const std::vector<int>& pairing)
{
	if (B.tgt.size() != 1 || B.tgt[0].twist != 0)
		throw std::invalid_argument("manin_dual: target must be a single untwisted motive");
	if (pairing.size() != B.src.size())
		throw std::invalid_argument("manin_dual: pairing size mismatch");
	int dW = B.tgt[0].V->dim;
	MotiveSum tgt = B.src;
	auto r = BlockCorrespondence::zero(B.tgt, tgt);
	for (size_t s = 0; s < B.src.size(); ++s) {
		int u = pairing[s];
		if (B.src[u].V != B.src[s].V ||
		    B.src[u].twist != dW - B.src[s].V->dim - B.src[s].twist)
			throw std::invalid_argument("manin_dual: pairing violates the twist rule");
		if (const Correspondence* e = B.get(u, 0))
			r.set(0, int(s), transpose(*e));
	}
	return r;
}

int nilpotency_order(const BlockCorrespondence& B)
{
	BlockCorrespondence p = B;
	int n = 1;
	int bound = int(B.src.size()) + 1;
	while (!p.is_zero()) {
		p = block_compose(B, p);
		++n;
		if (n > bound)
			throw std::domain_error("nilpotency_order: block is not nilpotent");
	}
	return n;
}

BlockCorrespondence block_binomial(const BlockCorrespondence& eta, const Rat& a)
{
	int order = nilpotency_order(eta);
	auto r = BlockCorrespondence::identity(eta.src);
	auto pw = BlockCorrespondence::identity(eta.src);
	for (int k = 1; k < order; ++k) {
		pw = block_compose(eta, pw);
		auto term = pw;
		term *= binom(a, k);
		r += term;
	}
	return r;
}

} // namespace mck
