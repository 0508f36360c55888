#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mck/ckd.hpp"
#include "mck/corresp.hpp"

using namespace mck;

TEST_CASE("identity and composition laws")
{
	auto P2 = build_projective_space(2);
	Correspondence d = identity_corr(P2);
	CHECK(compose(d, d) == d);
	CHECK(transpose(d) == d);

	// act(Delta) = id on every basis class
	for (int i = 0; i < P2->rank(); ++i)
		CHECK(d.act(Cls::basis(P2->alg(), i)) == Cls::basis(P2->alg(), i));
}

TEST_CASE("graphs act as pushforward and pullback")
{
	auto P2 = build_projective_space(2);
	auto pt2 = build_projective_bundle(tangent_bundle(P2), "P(T_P2)");
	Correspondence g = graph(pt2.pi);
	Correspondence tg = cograph(pt2.pi);

	Cls xi = pt2.xi_cls();
	CHECK(g.act(xi) == P2->one());
	CHECK(g.act(pt2.P->one()).is_zero());
	Cls h = P2->gen("h");
	CHECK(tg.act(h) == pt2.pi.pull(h));

	// functoriality of act under composition
	Correspondence gg = compose(tg, g); // pi^* pi_*
	for (int i = 0; i < pt2.P->rank(); ++i) {
		Cls b = Cls::basis(pt2.P->alg(), i);
		CHECK(gg.act(b) == tg.act(g.act(b)));
	}
}

TEST_CASE("Manin relations for a projective bundle")
{
	// Gamma_pi h^l tGamma_pi vanishes for l < r and equals Delta for l = r
	auto P2 = build_projective_space(2);
	auto pt2 = build_projective_bundle(tangent_bundle(P2), "P(T_P2)");
	Correspondence gpi = graph(pt2.pi);
	Correspondence tgpi = transpose(gpi);
	Correspondence h = intersect_with(pt2.xi_cls(), pt2.P);

	Correspondence c0 = compose(gpi, tgpi);
	CHECK(c0.is_zero());
	Correspondence c1 = compose(gpi, compose(h, tgpi));
	CHECK(c1 == identity_corr(P2));

	// Gamma_pi h^2 tGamma_pi = . s_1(E)
	Correspondence c2 = compose(gpi, compose(h, compose(h, tgpi)));
	CHECK(c2 == intersect_with(segre(tangent_bundle(P2), 1), P2));
}

TEST_CASE("h on a blow-up is minus tGamma_j Gamma_j")
{
	auto P2 = build_projective_space(2);
	auto pt = build_point();
	Mat Ppt(1, P2->rank());
	Ppt.at(0, 0) = 1;
	BundleData N{pt, 2, SparseVec::unit(0)};
	auto bu = build_blow_up(P2, {{pt, Morphism{pt, P2, Ppt}, N}}, "BlP2");
	Correspondence gj = graph(bu.exc[0].j);
	Correspondence h = Rat(-1) * compose(transpose(gj), gj);
	CHECK(h == intersect_with(Cls{bu.exc[0].E->alg(), bu.exc[0].xi}, bu.exc[0].E));
}

TEST_CASE("tensor products of correspondences")
{
	auto P1 = build_projective_space(1);
	auto Q = build_product(P1, P1, "P1xP1");
	CKDecomposition ck1 = ck_cellular_standard(P1);

	// Delta (x) Delta = Delta
	Correspondence dd = tensor(identity_corr(P1), identity_corr(P1), Q, Q);
	CHECK(dd == identity_corr(Q.V));

	// pi^0 (x) pi^2 is a rank-1 projector supported on CH^1
	Correspondence p02 = tensor(ck1.proj(0), ck1.proj(2), Q, Q);
	CHECK(compose(p02, p02) == p02);
	Mat act = p02.action_matrix();
	CHECK(rank(act) == 1);
	CHECK(trace(act) == 1);
	Cls h1 = Q.V->gen("h1"), h2 = Q.V->gen("h2");
	CHECK(p02.act(h1).is_zero());
	CHECK(p02.act(h2) == h2);

	// (a (x) b) o (a' (x) b') = (a o a') (x) (b o b')
	Correspondence a = ck1.proj(0), b = ck1.proj(2);
	Correspondence lhs = compose(tensor(a, b, Q, Q), tensor(b, a, Q, Q));
	Correspondence rhs = tensor(compose(a, b), compose(b, a), Q, Q);
	CHECK(lhs == rhs);
}

TEST_CASE("small diagonals")
{
	auto P1 = build_projective_space(1);
	// l = 2: Delta = 1 (x) pt + pt (x) 1
	Correspondence d = identity_corr(P1);
	Mat expect(2, 2);
	expect.at(0, 1) = 1;
	expect.at(1, 0) = 1;
	CHECK(d.coeff == expect);

	// l = 3 on P1 and P2: (Delta_123)_* (a x b) = a.b for all basis pairs
	for (int n = 1; n <= 2; ++n) {
		auto P = build_projective_space(n);
		Tensor3 T = small_diagonal3(P);
		for (int i = 0; i < P->rank(); ++i)
			for (int j = 0; j < P->rank(); ++j) {
				Cls a = Cls::basis(P->alg(), i), b = Cls::basis(P->alg(), j);
				CHECK(contract12(T, a, b) == a * b);
			}
	}
}

TEST_CASE("block binomial group law")
{
	// eta nilpotent on the blow-up machine; (1+eta)^{1/2} squared is 1+eta
	auto P2 = build_projective_space(2);
	auto XX = build_product(P2, P2, "P2xP2");
	const auto* A = P2->alg();
	Mat D(P2->rank(), XX.V->rank());
	for (int i = 0; i < A->dim(); ++i)
		for (int j = 0; j < A->dim(); ++j)
			for (auto& [k, c] : A->mul_basis(i, j).t)
				D.at(k, XX.pair_index(i, j)) += c;
	auto bu = build_blow_up(XX.V, {{P2, Morphism{P2, XX.V, D}, tangent_bundle(P2)}},
	                        "BlD(P2xP2)");
	ManinMachine mm = manin_blow_up(bu);
	auto half = block_binomial(mm.eta, rat(1, 2));
	auto full = block_compose(half, half);
	auto expect = BlockCorrespondence::identity(mm.sum) + mm.eta;
	CHECK(full == expect);
	auto inv = block_binomial(mm.eta, rat(-1, 2));
	CHECK(block_compose(half, inv) == BlockCorrespondence::identity(mm.sum));
}
