#pragma once

#include "mck/corresp.hpp"

namespace mck {

// Chow-Kuenneth decomposition: self-correspondences pi^0..pi^{2d} of codim d
// with the projector axioms, verified rather than assumed.
struct CKDecomposition {
	VarP X;
	std::vector<Correspondence> pi; // indices 0..2 dim X
	std::string provenance;

	const Correspondence& proj(int i) const { return pi.at(i); }
	int top() const { return int(pi.size()) - 1; }
	// cached action matrices of the projectors
	const Mat& action(int i) const;

  private:
	mutable std::vector<Mat> action_cache;
};

// The standard decomposition of a variety with finite-rank Chow groups:
// pi^{2p} projects onto the codimension-p part.
CKDecomposition ck_cellular_standard(VarP X);

CKDecomposition ck_product(const CKDecomposition& A, const CKDecomposition& B,
                           const ProductData& P);

// Manin machinery shared by the projective-bundle and blow-up constructors:
// an isomorphism Phi from a twisted motive sum, the lower-triangular
// sigma tPhi Phi = D (id + eta), and the corrected Psi = Phi (id+eta)^{-1/2}
// with Psi^{-1} = D sigma tPsi.
struct ManinMachine {
	MotiveSum sum;
	BlockCorrespondence Phi;
	BlockCorrespondence M; // sigma tPhi Phi
	BlockCorrespondence D; // diagonal of Delta_X and -Delta_Y entries
	BlockCorrespondence eta;
	BlockCorrespondence Psi;
	BlockCorrespondence Psi_inv;
};

ManinMachine manin_projective_bundle(const PBundleData& pb);
ManinMachine manin_blow_up(const BlowUpData& bu);

CKDecomposition ck_projective_bundle(const CKDecomposition& base, const PBundleData& pb);
CKDecomposition ck_blow_up(const CKDecomposition& ckX,
                           const std::vector<const CKDecomposition*>& ckY,
                           const BlowUpData& bu);
// Descent along p: X -> Y for the image model of a self-adjoint idempotent:
// pi_Y^i = (1/N) Gamma_p pi_X^i tGamma_p. Requires tGamma_p Gamma_p of pure
// grade 0; checked.
CKDecomposition ck_descend(const CKDecomposition& ckX, const IdempotentImageData& dd);

// --- verifier suite ---------------------------------------------------------

Report verify_ck(const CKDecomposition& ck);
Report verify_multiplicative(const CKDecomposition& ck);
Report verify_chern_grade(const CKDecomposition& ck);
Report verify_action_invariance(const CKDecomposition& ck, const GroupActionData& G);

// Grades s with a nonzero component of a (not necessarily homogeneous) class.
std::vector<int> class_grades(const CKDecomposition& ck, const Cls& a);
// Grades of a correspondence under the product decomposition of src x tgt.
std::vector<int> corr_grades(const Correspondence& g, const CKDecomposition& src,
                             const CKDecomposition& tgt);
bool pure_grade0(const Correspondence& g, const CKDecomposition& src,
                 const CKDecomposition& tgt);
// Grade decomposition of a class in CH(X x X) given by a Kuenneth matrix.
std::vector<int> product_class_grades(const Mat& cls, int codim, const CKDecomposition& src,
                                      const CKDecomposition& tgt);

// --- admissible sets --------------------------------------------------------

struct AdmissibleElement {
	std::string name;
	VarP V;
	const CKDecomposition* ck;
};

struct AdmissibleInclusion {
	int sub = 0, sup = 0; // element indices
	Morphism incl;
	BundleData normal; // N_{sub/sup} on sub
};

struct AdmissibleSet {
	std::vector<AdmissibleElement> elems;
	std::vector<AdmissibleInclusion> incls;
};

// Checks Definition-style admissibility: every element carries a verified
// self-dual multiplicative decomposition; for every declared inclusion the
// normal Chern classes are of grade 0 and the inclusion is of pure grade 0.
Report validate_admissible(const AdmissibleSet& S, bool full_ck_suite = true);

} // namespace mck
