#pragma once

#include "mck/algebra.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mck {

// A smooth projective variety with computable Chow theory: its Chow ring,
// dimension, total Chern class of the tangent bundle, and point class.
struct Variety {
	std::string name;
	int dim = 0;
	std::shared_ptr<GradedAlgebra> chow;
	SparseVec tangent_chern; // total c(T)
	SparseVec point_class;   // codim dim, degree 1
	std::vector<std::pair<std::string, SparseVec>> gens; // named classes for recipes/diagnostics

	const GradedAlgebra* alg() const { return chow.get(); }
	int rank() const { return chow->dim(); }
	Cls cls(SparseVec v) const { return {alg(), std::move(v)}; }
	Cls one() const { return Cls::one(alg()); }
	Cls pt() const { return {alg(), point_class}; }
	Cls tangent() const { return {alg(), tangent_chern}; }
	Cls gen(const std::string& n) const;
	std::vector<int> codim_ranks() const;
};

using VarP = std::shared_ptr<const Variety>;

// f: source -> target, recorded by its pullback f^*: CH(target) -> CH(source).
// Proper pushforward is the pairing adjoint.
struct Morphism {
	VarP source, target;
	Mat pullback; // rank(source) x rank(target)

	Cls pull(const Cls& a) const;
	Cls push(const Cls& a) const;
	Mat pushforward_matrix() const;
};

Morphism identity_morphism(VarP X);
Morphism compose(const Morphism& g, const Morphism& f); // g after f
Report verify_morphism(const Morphism& f, bool projection_formula = true);

struct BundleData {
	VarP carrier;
	int rank = 0;
	SparseVec chern; // total Chern class on the carrier

	Cls chern_cls() const { return {carrier->alg(), chern}; }
};

BundleData tangent_bundle(VarP X);

// ---- builders ------------------------------------------------------------

VarP build_point();
VarP build_projective_space(int n);

struct ProductData {
	VarP V;
	VarP X, Y;
	Morphism p1, p2;

	int pair_index(int i, int j) const { return i * Y->rank() + j; }
	std::pair<int, int> factor_index(int k) const { return {k / Y->rank(), k % Y->rank()}; }
	Cls external(const Cls& a, const Cls& b) const; // a x b
};

ProductData build_product(VarP X, VarP Y, const std::string& name);

struct PBundleData {
	VarP P;
	BundleData E;
	Morphism pi; // P -> carrier
	SparseVec xi;
	int r = 0; // fiber dimension = rank(E) - 1

	int index(int l, int i) const { return l * E.carrier->rank() + i; }
	Cls xi_cls() const { return {P->alg(), xi}; }
};

PBundleData build_projective_bundle(const BundleData& E, const std::string& name);

// Segre class s_k(E) on the carrier.
Cls segre(const BundleData& E, int k);

struct CenterComponent {
	VarP Y;
	Morphism incl; // Y -> X
	BundleData N;  // normal bundle of Y in X; rank = codimension
};

struct ExcComponent {
	VarP E;        // P(N); equals Y itself for a codim-1 center
	Morphism pi;   // E -> Y
	Morphism j;    // E -> X~
	SparseVec xi;  // relative O(1) class on E
	Mat jstar;     // direct pushforward CH(E) -> CH(X~)
	int r = 0;     // codim - 1
	int offset = 0; // first exceptional basis index (r > 0 only)
	PBundleData pb; // the bundle structure of E (r > 0 only)
};

// Blow-up of X along a disjoint union of smooth centers.
struct BlowUpData {
	VarP Xt;
	VarP X;
	Morphism rho; // X~ -> X
	std::vector<CenterComponent> centers;
	std::vector<ExcComponent> exc;
	bool degenerate = false; // every center had codimension 1: X~ == X

	int x_part(int i) const { return degenerate ? i : i; }
	int exc_index(int c, int l, int y) const;
	Cls exceptional_divisor_class(int c) const; // [E_c] in CH^1(X~)
	Cls jstar_cls(int c, const Cls& on_Ec) const;
};

BlowUpData build_blow_up(VarP X, std::vector<CenterComponent> centers, const std::string& name);

// Pullback along the inclusion of the strict transform Z~ -> X~, where
// X~ = Bl_Y(X) and Z~ = Bl_{Y'}(Z) for the declared clean intersections
// Y'_c = Y_c ∩ Z.
struct StrictTransformSpec {
	VarP Z;
	Morphism iZ; // Z -> X
	const BlowUpData* Zt = nullptr;
	std::vector<int> comp_map;   // Z~ center component -> ambient center component
	std::vector<Morphism> f;     // Y'_c -> Y_{comp_map[c]}
};

Morphism strict_transform_inclusion(const BlowUpData& ambient, const StrictTransformSpec& s);

// ch-level normal bundle bookkeeping for strict transforms:
// N_{Y,Z/X} = T_X|_{Y'} / <T_Y, T_Z> from the three declared normal bundles on Y'.
BundleData normal_excess_bundle(const BundleData& N_Yp_X, const BundleData& N_Yp_Y,
                                const BundleData& N_Yp_Z);
// N_{Z~/X~} via 0 -> N_{Z~/X~} -> rho'^* N_{Z/X} -> j'_* pi'^* N_{Y,Z/X} -> 0 (GRR for j').
BundleData normal_bundle_of_strict_transform(const BlowUpData& Zt, const BundleData& N_Z_X,
                                             const std::vector<BundleData>& N_YZX_per_comp);

// rho^* (j_Z)_* alpha expanded by the excess/Segre correction formula; the
// caller compares against the directly computed pullback of the pushforward.
Cls excess_pullback_of_pushforward(const BlowUpData& ambient, const StrictTransformSpec& s,
                                   const Morphism& jZt, const Cls& alpha);

// Image of a codim-preserving self-adjoint idempotent acting on CH(X), as a
// variety: the model for finite quotients and generically finite descents.
struct IdempotentImageData {
	VarP Y;
	Morphism p; // X -> Y
	Mat q_action;
	Rat N; // generic degree; pairing on Y is (1/N) * pairing upstairs
};

IdempotentImageData build_idempotent_image(VarP X, const Mat& q_action, const Rat& N,
                                           const SparseVec& pullback_tangent_chern,
                                           const std::string& name);

struct GroupActionData {
	VarP X;
	std::vector<std::string> names;     // element names, identity first
	std::vector<Mat> pullback;          // ring automorphisms of CH(X)
	Report verify() const;              // automorphisms + closure under composition
};

IdempotentImageData build_quotient(VarP X, const GroupActionData& G,
                                   const SparseVec& pullback_tangent_chern,
                                   const std::string& name);

// c(p^* T_Y) for a quotient p: X -> Y ramified simply along a smooth divisor
// R: K-theoretically p^* Omega_Y = Omega_X - j_* N^dual_{R/X}, pushed through
// GRR for the divisor inclusion j.
SparseVec quotient_pullback_tangent(VarP X, const Morphism& jR, const Cls& normal_c1_on_R);

} // namespace mck
