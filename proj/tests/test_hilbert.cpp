#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mck/hilbert.hpp"
#include "support/oracle.hpp"

using namespace mck;

namespace {

std::vector<long long> to_ll(const std::vector<int>& v)
{
	return {v.begin(), v.end()};
}

} // namespace

TEST_CASE("oracle sanity")
{
	CHECK(oracle::hilb_ranks(1, 2) == std::vector<long long>{1, 2, 3, 2, 1});
	CHECK(oracle::hilb_ranks(2, 2) == std::vector<long long>{1, 3, 6, 3, 1});
	CHECK(oracle::hilb_ranks(1, 3) == std::vector<long long>{1, 2, 5, 6, 5, 2, 1});
	CHECK(oracle::nested12_ranks(1) == std::vector<long long>{1, 3, 4, 3, 1});
	CHECK(oracle::nested23_ranks(1) == std::vector<long long>{1, 4, 9, 11, 9, 4, 1});
}

TEST_CASE("Hilbert square of P2")
{
	auto P2 = build_projective_space(2);
	CKDecomposition ck2 = ck_cellular_standard(P2);
	HilbSquareData hs = build_hilb_square(P2, ck2);
	CHECK(hs.report.all_pass());
	CHECK(to_ll(hs.quot.Y->codim_ranks()) == oracle::hilb_ranks(1, 2));
	// chi via c_top
	CHECK(Cls{hs.quot.Y->alg(), hs.quot.Y->tangent_chern}.part(4).deg() == 9);
}

TEST_CASE("Hilbert square of P1 x P1")
{
	auto P1 = build_projective_space(1);
	auto Q = build_product(P1, P1, "P1xP1");
	CKDecomposition ck1 = ck_cellular_standard(P1);
	CKDecomposition ckQ = ck_product(ck1, ck1, Q);
	HilbSquareData hs = build_hilb_square(Q.V, ckQ);
	CHECK(hs.report.all_pass());
	CHECK(to_ll(hs.quot.Y->codim_ranks()) == oracle::hilb_ranks(2, 2));
	// total rank = invariant count + rank CH(P1 x P1)
	CHECK(hs.quot.Y->rank() == 10 + 4);
}

TEST_CASE("Hilbert square of P1 is P2")
{
	auto P1 = build_projective_space(1);
	CKDecomposition ck1 = ck_cellular_standard(P1);
	HilbSquareData hs = build_hilb_square(P1, ck1);
	CHECK(hs.report.all_pass());
	CHECK(hs.quot.Y->codim_ranks() == std::vector<int>{1, 1, 1});
	CHECK(Cls{hs.quot.Y->alg(), hs.quot.Y->tangent_chern}.part(2).deg() == 3);
}

TEST_CASE("nested Hilbert schemes of P2")
{
	auto P2 = build_projective_space(2);
	CKDecomposition ck2 = ck_cellular_standard(P2);

	Nested12Data n12 = build_nested_12(P2, ck2);
	CHECK(n12.report.all_pass());
	CHECK(to_ll(n12.bl.Xt->codim_ranks()) == oracle::nested12_ranks(1));

	Nested23Data n23 = build_nested_23(P2, ck2);
	CHECK(n23.report.all_pass());
	CHECK(to_ll(n23.bl.Xt->codim_ranks()) == oracle::nested23_ranks(1));
	CHECK(n23.bl.Xt->rank() == 39);
}

TEST_CASE("nested Hilbert schemes of P1 degenerate gracefully")
{
	auto P1 = build_projective_space(1);
	CKDecomposition ck1 = ck_cellular_standard(P1);
	Nested12Data n12 = build_nested_12(P1, ck1);
	CHECK(n12.report.all_pass());
	CHECK(n12.bl.Xt->codim_ranks() == std::vector<int>{1, 2, 1});
}
