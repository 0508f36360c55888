#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mck/algebra.hpp"
#include "mck/variety.hpp"

using namespace mck;

TEST_CASE("rationals are exact")
{
	Rat a = rat(1, 3);
	CHECK(a + rat(1, 6) == rat(1, 2));
	CHECK(binom(rat(-1, 2), 2) == rat(3, 8));
	CHECK(binom(rat(1, 2), 3) == rat(1, 16));
	CHECK(factorial(5) == 120);
}

TEST_CASE("projective space Chow ring")
{
	auto P2 = build_projective_space(2);
	const auto* A = P2->alg();
	Cls h = P2->gen("h");
	CHECK((h * h).deg() == 1);
	CHECK((h * h * h).is_zero());
	CHECK(A->verify_axioms(true).all_pass());

	// dual of h is h (deg h^2 = 1)
	auto duals = A->dual_basis(1);
	CHECK(duals.size() == 1);
	CHECK(duals[0] == SparseVec::unit(1));
}

TEST_CASE("point and product pairings")
{
	auto pt = build_point();
	CHECK(pt->alg()->dual_basis(0)[0] == SparseVec::unit(0));

	auto P1 = build_projective_space(1);
	auto Q = build_product(P1, P1, "P1xP1");
	CHECK(Q.V->codim_ranks() == std::vector<int>{1, 2, 1});
	CHECK(Q.V->alg()->verify_axioms(true).all_pass());

	// dual of h1 is h2
	Cls h1 = Q.V->gen("h1"), h2 = Q.V->gen("h2");
	CHECK((h1 * h2).deg() == 1);
	CHECK((h1 * h1).is_zero());
	auto duals = Q.V->alg()->dual_basis(1);
	const auto& slot = Q.V->alg()->slots[1];
	for (size_t k = 0; k < slot.size(); ++k) {
		Cls d{Q.V->alg(), duals[k]};
		Cls b = Cls::basis(Q.V->alg(), slot[k]);
		CHECK((b * d).deg() == 1);
	}
	CHECK(Cls{Q.V->alg(), duals[0]} == (SparseVec::unit(slot[0]) == h1.v ? h2 : h1));
}

TEST_CASE("series inversion")
{
	auto P2 = build_projective_space(2);
	Cls h = P2->gen("h");
	Cls one = P2->one();

	Cls s = one + h;
	Cls inv = series_invert(s);
	CHECK(inv == one - h + h * h);
	CHECK(series_invert(series_invert(s)) == s);
	CHECK(series_invert(one) == one);

	Cls cT = P2->tangent();
	CHECK(cT == one + 3 * h + 3 * (h * h));
	CHECK(series_invert(cT) == one - 3 * h + 6 * (h * h));
}

TEST_CASE("chern character and todd")
{
	auto P2 = build_projective_space(2);
	Cls h = P2->gen("h");
	Cls one = P2->one();

	// line bundle: ch = 1 + l + l^2/2
	Cls ch = chern_character(1, one + h);
	CHECK(ch == one + h + rat(1, 2) * (h * h));

	// todd of the trivial bundle
	CHECK(todd(one) == one);
	// todd of a line bundle: 1 + x/2 + x^2/12
	CHECK(todd(one + h) == one + rat(1, 2) * h + rat(1, 12) * (h * h));
	// (1 - e^{-x})/x
	CHECK(todd_inverse_of_line(h) == one - rat(1, 2) * h + rat(1, 6) * (h * h));
	CHECK(todd(one + h) * todd_inverse_of_line(h) == one);

	// ch(T_P2) codim-2 part: (c1^2 - 2 c2)/2 = 3 h^2 / 2
	Cls chT = chern_character(2, P2->tangent());
	CHECK(chT.part(2) == rat(3, 2) * (h * h));
	CHECK(chT.part(0) == 2 * one);

	// roundtrip
	CHECK(chern_from_character(chT) == P2->tangent());
}

TEST_CASE("nilpotent binomial series")
{
	auto P2 = build_projective_space(2);
	Cls h = P2->gen("h");
	Cls one = P2->one();
	Cls zero = Cls::zero(P2->alg());

	CHECK(nilpotent_binomial(zero, rat(-1, 2)) == one);

	// truncation at order 2 forces linearity: on P1, h^2 = 0
	auto P1 = build_projective_space(1);
	Cls t = P1->gen("h");
	CHECK(nilpotent_binomial(t, rat(5, 7)) == Cls::one(P1->alg()) + rat(5, 7) * t);

	// group law (1+x)^a (1+x)^b = (1+x)^{a+b} for a, b in {1, -1, 1/2, -1/2}
	Cls x = 2 * h + 5 * (h * h);
	std::vector<Rat> exps = {rat(1), rat(-1), rat(1, 2), rat(-1, 2)};
	for (auto& a : exps)
		for (auto& b : exps)
			CHECK(nilpotent_binomial(x, a) * nilpotent_binomial(x, b) ==
			      nilpotent_binomial(x, a + b));
	CHECK(nilpotent_binomial(x, rat(1, 2)) * nilpotent_binomial(x, rat(1, 2)) == one + x);
}

TEST_CASE("chern twist by a line bundle")
{
	auto P2 = build_projective_space(2);
	Cls h = P2->gen("h");
	Cls one = P2->one();
	// E (x) E^dual for a line bundle is trivial
	CHECK(chern_twist_line(one + h, 1, -h) == one);
	// rank-2: c1 += 2x, c2 += c1 x + x^2
	Cls c = one + 3 * h + 3 * (h * h);
	Cls tw = chern_twist_line(c, 2, h);
	CHECK(tw.part(1) == 5 * h);
	CHECK(tw.part(2) == (3 + 3 + 1) * (h * h));
}

TEST_CASE("perturbed multiplication table is rejected")
{
	auto P2 = build_projective_space(2);
	auto A = std::make_shared<GradedAlgebra>(*P2->alg());
	A->table[1][1].add_term(1, rat(1, 7)); // h*h gains an off-grade term
	Report r = A->verify_axioms(true);
	CHECK(!r.all_pass());
	CHECK(!r.first_failure()->witness.empty());
}
