#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mck/corresp.hpp"
#include "mck/variety.hpp"

using namespace mck;

namespace {

// point embedded in X: pullback keeps the codim-0 coefficient
Morphism point_inclusion(VarP pt, VarP X)
{
	Mat P(1, X->rank());
	P.at(0, X->alg()->unit) = 1;
	return {pt, X, P};
}

// diagonal X -> X x X: pullback is the multiplication map
Morphism diagonal_morphism(const ProductData& XX)
{
	VarP X = XX.X;
	const auto* A = X->alg();
	Mat P(X->rank(), XX.V->rank());
	for (int i = 0; i < A->dim(); ++i)
		for (int j = 0; j < A->dim(); ++j) {
			const SparseVec& m = A->mul_basis(i, j);
			for (auto& [k, c] : m.t)
				P.at(k, XX.pair_index(i, j)) += c;
		}
	return {X, XX.V, P};
}

BlowUpData blow_up_point(VarP X, const std::string& name)
{
	auto pt = build_point();
	BundleData N{pt, X->dim, SparseVec::unit(0)};
	return build_blow_up(X, {{pt, point_inclusion(pt, X), N}}, name);
}

} // namespace

TEST_CASE("products")
{
	auto P1 = build_projective_space(1);
	auto P2 = build_projective_space(2);
	auto Q = build_product(P1, P1, "P1xP1");
	CHECK(Q.V->codim_ranks() == std::vector<int>{1, 2, 1});
	auto W = build_product(P2, P2, "P2xP2");
	CHECK(W.V->codim_ranks() == std::vector<int>{1, 2, 3, 2, 1});

	auto pt = build_point();
	auto PX = build_product(pt, P2, "ptxP2");
	CHECK(PX.V->codim_ranks() == P2->codim_ranks());
	CHECK(PX.V->alg()->verify_axioms(true).all_pass());

	CHECK(verify_morphism(W.p1).all_pass());
	CHECK(verify_morphism(W.p2).all_pass());

	// Euler characteristic of P2 x P2 via c_top
	Cls ctop = Cls{W.V->alg(), W.V->tangent_chern}.part(4);
	CHECK(ctop.deg() == 9);
}

TEST_CASE("projective bundles")
{
	auto pt = build_point();
	// trivial rank-3 bundle over a point is P2
	BundleData triv{pt, 3, SparseVec::unit(0)};
	auto pb = build_projective_bundle(triv, "P(O^3)");
	CHECK(pb.P->codim_ranks() == std::vector<int>{1, 1, 1});
	Cls xi = pb.xi_cls();
	CHECK((xi * xi).deg() == 1);
	CHECK(pb.P->alg()->verify_axioms(true).all_pass());

	// P(T_P2): ranks (1,2,2,1), relation xi^2 = -3 h xi - 3 h^2
	auto P2 = build_projective_space(2);
	auto pt2 = build_projective_bundle(tangent_bundle(P2), "P(T_P2)");
	CHECK(pt2.P->codim_ranks() == std::vector<int>{1, 2, 2, 1});
	CHECK(pt2.P->alg()->verify_axioms(true).all_pass());
	Cls h = pt2.pi.pull(P2->gen("h"));
	Cls x = pt2.xi_cls();
	CHECK(x * x == -3 * (h * x) - 3 * (h * h));

	// pushforward follows the Segre convention pi_* xi^{r+k} = s_k
	CHECK(pt2.pi.push(pt2.P->one()).is_zero());
	CHECK(pt2.pi.push(x) == P2->one());
	CHECK(pt2.pi.push(x * x) == segre(tangent_bundle(P2), 1));
	CHECK(segre(tangent_bundle(P2), 1) == -3 * P2->gen("h"));
	CHECK(verify_morphism(pt2.pi).all_pass());

	// chi(P(T_P2)) = chi(P2) * chi(P1) = 6
	Cls ctop = Cls{pt2.P->alg(), pt2.P->tangent_chern}.part(3);
	CHECK(ctop.deg() == 6);

	// constant map pushforward: deg of a point
	Mat cp(P2->rank(), 1);
	cp.at(0, 0) = 1;
	Morphism cst{P2, pt, cp};
	CHECK(cst.push(P2->pt()) == Cls::one(pt->alg()));
}

TEST_CASE("blow-up of a point in P2")
{
	auto P2 = build_projective_space(2);
	auto bu = blow_up_point(P2, "BlP2");
	CHECK(bu.Xt->codim_ranks() == std::vector<int>{1, 2, 1});
	CHECK(bu.Xt->alg()->verify_axioms(true).all_pass());

	Cls e = bu.exceptional_divisor_class(0);
	Cls ptc = bu.Xt->pt();
	CHECK(e * e == -ptc);
	CHECK((e * e).deg() == -1);

	// j_*(1) = e
	CHECK(bu.jstar_cls(0, Cls::one(bu.exc[0].E->alg())) == e);

	// chi(Bl_pt P2) = 4 via deg c_top(T)
	CHECK(Cls{bu.Xt->alg(), bu.Xt->tangent_chern}.part(2).deg() == 4);
	// K^2 = c_1^2 drops from 9 to 8
	Cls c1 = Cls{bu.Xt->alg(), bu.Xt->tangent_chern}.part(1);
	CHECK((c1 * c1).deg() == 8);

	CHECK(verify_morphism(bu.rho).all_pass());
	CHECK(verify_morphism(bu.exc[0].j).all_pass());

	// (g o f)^* = f^* o g^* for E -> BlP2 -> P2
	Morphism comp = compose(bu.rho, bu.exc[0].j);
	CHECK(comp.pullback == mat_mul(bu.exc[0].j.pullback, bu.rho.pullback));
}

TEST_CASE("blow-up of two disjoint points")
{
	auto P2 = build_projective_space(2);
	auto pt = build_point();
	BundleData N{pt, 2, SparseVec::unit(0)};
	auto bu = build_blow_up(
	    P2, {{pt, point_inclusion(pt, P2), N}, {pt, point_inclusion(pt, P2), N}}, "Bl2P2");
	CHECK(bu.Xt->codim_ranks() == std::vector<int>{1, 3, 1});
	CHECK(bu.Xt->alg()->verify_axioms(true).all_pass());
	Cls e1 = bu.exceptional_divisor_class(0), e2 = bu.exceptional_divisor_class(1);
	CHECK((e1 * e2).is_zero());
	CHECK(e1 * e1 == -bu.Xt->pt());
	CHECK(Cls{bu.Xt->alg(), bu.Xt->tangent_chern}.part(2).deg() == 5);
}

TEST_CASE("blow-up of the diagonal in P2 x P2")
{
	auto P2 = build_projective_space(2);
	auto XX = build_product(P2, P2, "P2xP2");
	Morphism diag = diagonal_morphism(XX);
	CHECK(verify_morphism(diag).all_pass());
	auto bu = build_blow_up(XX.V, {{P2, diag, tangent_bundle(P2)}}, "Bl_D(P2xP2)");
	CHECK(bu.Xt->codim_ranks() == std::vector<int>{1, 3, 4, 3, 1});
	CHECK(bu.Xt->alg()->verify_axioms(true).all_pass());
	// chi = chi(P2)^2 - chi(P2) + chi(P(T_P2)) = 9 - 3 + 6 = 12
	CHECK(Cls{bu.Xt->alg(), bu.Xt->tangent_chern}.part(4).deg() == 12);
}

TEST_CASE("excess pullback of a pushforward (generalized key formula)")
{
	// line Z = P1 through the blown-up point of P2
	auto P2 = build_projective_space(2);
	auto P1 = build_projective_space(1);
	auto pt = build_point();
	BundleData Npt{pt, 2, SparseVec::unit(0)};
	auto bu = build_blow_up(P2, {{pt, point_inclusion(pt, P2), Npt}}, "BlP2");

	Mat IZ(P1->rank(), P2->rank());
	IZ.at(0, 0) = 1;
	IZ.at(1, 1) = 1; // h -> h, h^2 -> 0
	Morphism iZ{P1, P2, IZ};
	CHECK(verify_morphism(iZ, false).all_pass());

	// Z~ = Bl_pt(P1) = P1 (codimension-1 center)
	BundleData Npl{pt, 1, SparseVec::unit(0)};
	auto zt = build_blow_up(P1, {{pt, point_inclusion(pt, P1), Npl}}, "BlptP1");
	CHECK(zt.degenerate);

	StrictTransformSpec spec;
	spec.Z = P1;
	spec.iZ = iZ;
	spec.Zt = &zt;
	spec.comp_map = {0};
	spec.f = {identity_morphism(pt)};

	Morphism jZt = strict_transform_inclusion(bu, spec);
	CHECK(verify_morphism(jZt, false).all_pass());

	// strict transform class: rho^* h = [Z~] + e
	Cls e = bu.exceptional_divisor_class(0);
	Cls strict = jZt.push(zt.Xt->one());
	CHECK(bu.rho.pull(P2->gen("h")) == strict + e);

	for (int p = 0; p <= 1; ++p) {
		Cls alpha = p == 0 ? P1->one() : P1->pt();
		Cls lhs = bu.rho.pull(iZ.push(alpha));
		Cls rhs = excess_pullback_of_pushforward(bu, spec, jZt, alpha);
		CHECK(lhs == rhs);
	}
}

TEST_CASE("normal bundle of a strict transform: codim-1 twist")
{
	// Y' = pt inside Z = P1 inside X = P2, blow up X at Y = pt:
	// N_{Z~/X~} = rho'^* N_{Z/X} (x) O(-E')
	auto P1 = build_projective_space(1);
	auto pt = build_point();
	BundleData Npl{pt, 1, SparseVec::unit(0)};
	auto zt = build_blow_up(P1, {{pt, point_inclusion(pt, P1), Npl}}, "BlptP1");

	SparseVec oh = SparseVec::unit(0);
	oh.add_term(1, 1);
	BundleData NZX{P1, 1, oh}; // N_{Z/X} = O(1)
	BundleData NYZX{pt, 1, SparseVec::unit(0)};
	BundleData out = normal_bundle_of_strict_transform(zt, NZX, {NYZX});
	// expected total chern 1 + (h - [E']) = 1 + h - [pt]
	Cls expect = zt.Xt->one() + Cls{zt.Xt->alg(), SparseVec::unit(1)} -
	             zt.exc[0].j.push(Cls::one(pt->alg()));
	CHECK(out.chern_cls() == expect);

	// transversal case: N_{Y,Z/X} = 0 keeps the pullback
	BundleData zero_excess{pt, 0, SparseVec::unit(0)};
	BundleData out2 = normal_bundle_of_strict_transform(zt, NZX, {zero_excess});
	CHECK(out2.chern_cls() == zt.rho.pull(NZX.chern_cls()));
}

TEST_CASE("quotients")
{
	auto P1 = build_projective_space(1);
	auto Q = build_product(P1, P1, "P1xP1");

	Mat swapm(Q.V->rank(), Q.V->rank());
	for (int i = 0; i < P1->rank(); ++i)
		for (int j = 0; j < P1->rank(); ++j)
			swapm.at(Q.pair_index(j, i), Q.pair_index(i, j)) = 1;
	GroupActionData G{Q.V, {"e", "s"}, {Mat::identity(Q.V->rank()), swapm}};
	CHECK(G.verify().all_pass());

	Morphism diag = diagonal_morphism(Q);
	Cls n_delta = 2 * P1->gen("h"); // c1(N_Delta) = c1(T_P1)
	SparseVec ptan = quotient_pullback_tangent(Q.V, diag, n_delta);

	auto dd = build_quotient(Q.V, G, ptan, "Sym2P1");
	CHECK(dd.Y->codim_ranks() == std::vector<int>{1, 1, 1});
	CHECK(dd.Y->alg()->verify_axioms(true).all_pass());

	// Sym^2 P1 = P2: hyperplane self-intersection 1, chi = 3
	Cls hy = Cls::basis(dd.Y->alg(), dd.Y->alg()->slots[1][0]);
	CHECK((hy * hy).deg() == 1);
	CHECK(Cls{dd.Y->alg(), dd.Y->tangent_chern}.part(2).deg() == 3);
	CHECK(Cls{dd.Y->alg(), dd.Y->tangent_chern}.part(1) == 3 * hy);

	// p_* p^* = |G|
	Mat pp = mat_mul(dd.p.pushforward_matrix(), dd.p.pullback);
	CHECK(pp == Rat(2) * Mat::identity(dd.Y->rank()));

	// trivial group: X unchanged
	GroupActionData T{Q.V, {"e"}, {Mat::identity(Q.V->rank())}};
	auto tq = build_quotient(Q.V, T, Q.V->tangent_chern, "triv");
	CHECK(tq.Y->codim_ranks() == Q.V->codim_ranks());
}
