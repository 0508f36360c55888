#pragma once

#include "mck/ckd.hpp"

namespace mck {

// X^[2] = Bl_Delta(X x X) / S_2, with the descended decomposition.
struct HilbSquareData {
	VarP X;
	ProductData XX;
	CKDecomposition ckXX;
	Morphism diag; // X -> X x X
	BlowUpData bl; // B = Bl_Delta(X x X) = X^[1,2]
	CKDecomposition ckB;
	GroupActionData swap_action; // on B
	IdempotentImageData quot;    // X^[2]
	CKDecomposition ckH;
	Report report;
};

HilbSquareData build_hilb_square(VarP X, const CKDecomposition& ckX);

// X^[1,2] = Bl_Delta(X x X) with its blow-up decomposition.
struct Nested12Data {
	BlowUpData bl;
	CKDecomposition ck;
	Report report;
};

Nested12Data build_nested_12(VarP X, const CKDecomposition& ckX);

// X^[2,3] = Bl_Y(X x X^[2]) along the universal length-2 subscheme
// Y = X^[1,2].
struct Nested23Data {
	HilbSquareData h2;
	ProductData XH; // X x X^[2]
	CKDecomposition ckXH;
	Morphism iY;   // X^[1,2] -> X x X^[2]
	BundleData N;  // N_{Y / X x X^[2]}
	BlowUpData bl; // X^[2,3]
	CKDecomposition ck;
	Report report;
};

Nested23Data build_nested_23(VarP X, const CKDecomposition& ckX);

// The resolution tower X0 = X^3 <- X1 <- X2 <- X3 of the rational map
// X^3 --> X^[3] for a surface X, with S_3-equivariant decompositions and the
// auxiliary subvariety data of the admissible sets.
struct TowerData {
	VarP X;
	CKDecomposition ckX;

	ProductData XX, X0;
	CKDecomposition ckXX, ckX0;
	Morphism diagXX;                // X -> X x X
	std::vector<Morphism> phi;      // phi_12, phi_13, phi_23 : X x X -> X^3
	GroupActionData s3_X0;

	BlowUpData bl1; // X1 = Bl_{Delta_123}(X0)
	CKDecomposition ckX1, ckE1;
	GroupActionData s3_X1;

	BlowUpData blB; // B = Bl_Delta(X x X), the model of the big diagonals
	CKDecomposition ckB, ckPT;
	VarP PT; // P(T_X), realized as the exceptional divisor of B
	std::vector<Morphism> incl_Dij; // B -> X1 (strict transforms of the Delta_ij)
	BundleData N_Dij;               // N_{~Delta_ij / X1} on B

	BlowUpData bl2; // X2 = Bl_{U ~Delta_ij}(X1)
	CKDecomposition ckX2;
	GroupActionData s3_X2;

	VarP P1;
	ProductData W; // W = P1 x P(T_X)
	CKDecomposition ckP1, ckW;
	Morphism inclW_E1;                // W -> E1
	std::vector<Morphism> inclWij_W;  // PT -> W (three slices)
	std::vector<Morphism> inclWij_E1; // PT -> E1 (projective subbundles)
	Morphism inclW_X2;                // W~ -> X2
	BundleData N_Wt_X2;

	BlowUpData blE1p; // E1' = Bl_{U W_ij}(E1)
	CKDecomposition ckE1p;
	Morphism inclE1p_X2, inclE1p_X3;

	BlowUpData bl3; // X3 = Bl_{W~}(X2)
	CKDecomposition ckX3;
	GroupActionData s3_X3;

	Report report; // admissibility and verifier outcomes per stage
};

TowerData build_tower(VarP X, const CKDecomposition& ckX);

// Descent data for p : X3 -> X^[3]: the correspondence K = tGamma_p Gamma_p
// assembled from the group graphs, the exact excess term over B_3, and the
// two fiber-product components over B_2 with coefficients determined by
// idempotency.
struct CubeDescentData {
	Correspondence domin;      // sum of the graphs of S_3
	Correspondence T1, C1, C2; // excess term and the two B_2 components
	Rat lambda1, lambda2;
	Correspondence K, q;
	SparseVec pullback_tangent; // c(p^* T_{X^[3]}) on X3
	IdempotentImageData img;    // X^[3]
	CKDecomposition ck;
	Report report;
};

CubeDescentData build_descent(const TowerData& tw);

} // namespace mck
