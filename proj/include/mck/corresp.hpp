#pragma once

#include "mck/variety.hpp"

#include <optional>

namespace mck {

// A pure-codimension class in CH(src x tgt), stored in Kuenneth coordinates:
// coeff(i,j) is the coefficient on b_i x b_j. Composition contracts through
// the pairing of the middle variety, which on varieties with finite-rank Chow
// groups agrees with the pullback-intersect-pushforward definition.
struct Correspondence {
	VarP src, tgt;
	int codim = 0;
	Mat coeff; // rank(src) x rank(tgt)

	bool is_zero() const { return coeff.is_zero(); }
	bool operator==(const Correspondence& o) const;

	Mat action_matrix() const; // CH(src) -> CH(tgt)
	Cls act(const Cls& a) const;

	Correspondence& operator+=(const Correspondence& o);
	Correspondence& operator-=(const Correspondence& o);
	Correspondence& operator*=(const Rat& c);
	friend Correspondence operator+(Correspondence a, const Correspondence& b) { return a += b; }
	friend Correspondence operator-(Correspondence a, const Correspondence& b) { return a -= b; }
	friend Correspondence operator*(Correspondence a, const Rat& c) { return a *= c; }
	friend Correspondence operator*(const Rat& c, Correspondence a) { return a *= c; }
};

Correspondence make_correspondence(VarP src, VarP tgt, Mat coeff, int codim);
Correspondence corr_zero(VarP src, VarP tgt, int codim);
// Correspondence with prescribed action; codim as declared.
Correspondence corr_from_action(VarP src, VarP tgt, const Mat& action, int codim);
Correspondence identity_corr(VarP X);
Correspondence compose(const Correspondence& after, const Correspondence& before);
Correspondence transpose(const Correspondence& c);
Correspondence graph(const Morphism& f);            // acts as f_*
Correspondence cograph(const Morphism& f);          // transpose of the graph; acts as f^*
Correspondence intersect_with(const Cls& a, VarP X); // diagonal pushforward of a; acts as (- . a)
Correspondence corr_pow(const Correspondence& c, int k); // k-fold self-composition

// (a x b) |-> (A_* a) x (B_* b) on Kuenneth matrices of classes in CH(X1 x Y1).
Mat act_on_product_class(const Correspondence& A, const Correspondence& B, const Mat& cls);

// Kuenneth tensor of correspondences, landing in product varieties.
Correspondence tensor(const Correspondence& A, const Correspondence& B, const ProductData& src,
                      const ProductData& tgt);

// --- small diagonals -------------------------------------------------------

// Sparse symmetric 3-tensor over the basis of one variety.
struct Tensor3 {
	const GradedAlgebra* A = nullptr;
	std::vector<std::tuple<int, int, int, Rat>> t;

	bool is_zero() const { return t.empty(); }
};

// Kuenneth coordinates of the small diagonal of X^3.
Tensor3 small_diagonal3(VarP X);
// Slotwise matrix action (M1 (x) M2 (x) M3)_* T; Mi map into the algebra B.
Tensor3 apply3(const Mat& M1, const Mat& M2, const Mat& M3, const Tensor3& T,
               const GradedAlgebra* B);
// Componentwise product of two tensors over the same variety.
Tensor3 mul3(const Tensor3& S, const Tensor3& T);
// (Delta_123)_* (a x b) = a.b realized by contraction of the first two slots.
Cls contract12(const Tensor3& T, const Cls& a, const Cls& b);

// --- block correspondences between twisted motive sums ---------------------

struct MotiveSummand {
	VarP V;
	int twist = 0;
};
using MotiveSum = std::vector<MotiveSummand>;

// Matrix of correspondences between formal sums of twisted motives. The entry
// from slot s to slot t is a class of codimension dim(V_s) + a_s - b_t.
struct BlockCorrespondence {
	MotiveSum src, tgt;
	std::vector<std::vector<std::optional<Correspondence>>> entry; // [s][t]

	static BlockCorrespondence zero(MotiveSum src, MotiveSum tgt);
	static BlockCorrespondence identity(const MotiveSum& sum);

	int expected_codim(int s, int t) const;
	void set(int s, int t, Correspondence c); // validates shape and codimension
	const Correspondence* get(int s, int t) const;

	bool is_zero() const;
	bool operator==(const BlockCorrespondence& o) const;

	BlockCorrespondence& operator+=(const BlockCorrespondence& o);
	BlockCorrespondence& operator-=(const BlockCorrespondence& o);
	BlockCorrespondence& operator*=(const Rat& c);
	friend BlockCorrespondence operator+(BlockCorrespondence a, const BlockCorrespondence& b)
	{
		return a += b;
	}
	friend BlockCorrespondence operator-(BlockCorrespondence a, const BlockCorrespondence& b)
	{
		return a -= b;
	}
};

BlockCorrespondence block_compose(const BlockCorrespondence& after,
                                  const BlockCorrespondence& before);
// Transpose with explicitly declared new source/target sums (twists are not
// determined by the entries alone).
BlockCorrespondence block_transpose(const BlockCorrespondence& B, MotiveSum new_src,
                                    MotiveSum new_tgt);
// sigma . tB for B: sum -> h(W). The permutation sigma is supplied
// explicitly: pairing[s] is the summand whose transposed entry lands in
// slot s; it must carry the same variety and the complementary twist
// dim W - dim V - a_s.
BlockCorrespondence manin_dual(const BlockCorrespondence& B, const std::vector<int>& pairing);
// Nilpotency order of a square block (throws if not nilpotent).
int nilpotency_order(const BlockCorrespondence& B);
// (id + eta)^a for nilpotent eta.
BlockCorrespondence block_binomial(const BlockCorrespondence& eta, const Rat& a);

} // namespace mck
