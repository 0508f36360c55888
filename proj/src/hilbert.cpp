#include "mck/hilbert.hpp"

#include <fmt/format.h>

#include <array>
#include <set>

namespace mck {

namespace {

Morphism diagonal_morphism(const ProductData& XX)
{
	VarP X = XX.X;
	const auto* A = X->alg();
	Mat P(X->rank(), XX.V->rank());
	for (int i = 0; i < A->dim(); ++i)
		for (int j = 0; j < A->dim(); ++j)
			for (auto& [k, c] : A->mul_basis(i, j).t)
				P.at(k, XX.pair_index(i, j)) += c;
	return {X, XX.V, P};
}

Mat swap_matrix(const ProductData& XX)
{
	if (XX.X != XX.Y)
		throw std::invalid_argument("swap_matrix: factors differ");
	int n = XX.X->rank();
	Mat m(XX.V->rank(), XX.V->rank());
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j)
			m.at(XX.pair_index(j, i), XX.pair_index(i, j)) = 1;
	return m;
}

void merge_prefixed(Report& into, const Report& r, const std::string& prefix)
{
	for (auto& c : r.checks)
		into.add(fmt::format("{}.{}", prefix, c.id), c.pass, c.witness);
}

} // namespace

HilbSquareData build_hilb_square(VarP X, const CKDecomposition& ckX)
{
	HilbSquareData hs;
	hs.X = X;
	hs.XX = build_product(X, X, fmt::format("{}^2", X->name));
	hs.ckXX = ck_product(ckX, ckX, hs.XX);
	hs.diag = diagonal_morphism(hs.XX);
	hs.bl = build_blow_up(hs.XX.V, {{X, hs.diag, tangent_bundle(X)}},
	                      fmt::format("{}^[1,2]", X->name));
	hs.ckB = hs.bl.degenerate ? hs.ckXX : ck_blow_up(hs.ckXX, {&ckX}, hs.bl);

	// the factor swap fixes the diagonal and acts trivially on the
	// exceptional summand (it is -1 on the normal bundle)
	int nB = hs.bl.Xt->rank();
	Mat sw(nB, nB);
	Mat swXX = swap_matrix(hs.XX);
	for (int i = 0; i < hs.XX.V->rank(); ++i)
		for (int j = 0; j < hs.XX.V->rank(); ++j)
			sw.at(i, j) = swXX.at(i, j);
	for (int k = hs.XX.V->rank(); k < nB; ++k)
		sw.at(k, k) = 1;
	hs.swap_action = {hs.bl.Xt, {"e", "s"}, {Mat::identity(nB), sw}};
	merge_prefixed(hs.report, hs.swap_action.verify(), "square.action");
	merge_prefixed(hs.report, verify_action_invariance(hs.ckB, hs.swap_action),
	               "square.action");

	Cls xiE{hs.bl.exc[0].E->alg(), hs.bl.exc[0].xi};
	SparseVec ptan = quotient_pullback_tangent(hs.bl.Xt, hs.bl.exc[0].j, -xiE);
	hs.quot = build_quotient(hs.bl.Xt, hs.swap_action, ptan, fmt::format("{}^[2]", X->name));
	hs.ckH = ck_descend(hs.ckB, hs.quot);

	merge_prefixed(hs.report, verify_ck(hs.ckB), "nested12");
	merge_prefixed(hs.report, verify_multiplicative(hs.ckB), "nested12");
	merge_prefixed(hs.report, verify_chern_grade(hs.ckB), "nested12");
	merge_prefixed(hs.report, verify_ck(hs.ckH), "square");
	merge_prefixed(hs.report, verify_multiplicative(hs.ckH), "square");
	merge_prefixed(hs.report, verify_chern_grade(hs.ckH), "square");
	return hs;
}

Nested12Data build_nested_12(VarP X, const CKDecomposition& ckX)
{
	Nested12Data n;
	auto XX = build_product(X, X, fmt::format("{}^2", X->name));
	CKDecomposition ckXX = ck_product(ckX, ckX, XX);
	Morphism diag = diagonal_morphism(XX);
	n.bl = build_blow_up(XX.V, {{X, diag, tangent_bundle(X)}},
	                     fmt::format("{}^[1,2]", X->name));
	n.ck = n.bl.degenerate ? ckXX : ck_blow_up(ckXX, {&ckX}, n.bl);
	merge_prefixed(n.report, verify_ck(n.ck), "nested12");
	merge_prefixed(n.report, verify_multiplicative(n.ck), "nested12");
	merge_prefixed(n.report, verify_chern_grade(n.ck), "nested12");
	return n;
}

Nested23Data build_nested_23(VarP X, const CKDecomposition& ckX)
{
	Nested23Data n;
	n.h2 = build_hilb_square(X, ckX);
	VarP B = n.h2.bl.Xt;
	VarP H = n.h2.quot.Y;

	n.XH = build_product(X, H, fmt::format("{}x{}", X->name, H->name));
	n.ckXH = ck_product(ckX, n.h2.ckH, n.XH);

	// i = (pr_1 rho, p): B -> X x X^[2]
	Morphism pr1rho = compose(n.h2.XX.p1, n.h2.bl.rho);
	{
		Mat P(B->rank(), n.XH.V->rank());
		const auto* AB = B->alg();
		for (int a = 0; a < X->rank(); ++a)
			for (int b = 0; b < H->rank(); ++b) {
				SparseVec col = AB->mul(pr1rho.pullback.col_sparse(a),
				                        n.h2.quot.p.pullback.col_sparse(b));
				for (auto& [k, c] : col.t)
					P.at(k, n.XH.pair_index(a, b)) = c;
			}
		n.iY = {B, n.XH.V, P};
	}

	// 0 -> T_X|_Y -> N_{Y/X x X^[2]} -> Q -> 0 with Q the torsion quotient of
	// T_Y -> p^* T_{X^[2]}
	Cls chTXY = pr1rho.pull(chern_character(Rat(X->dim), X->tangent()));
	Cls chH_up = chern_character(Rat(2 * X->dim),
	                             Cls{B->alg(), n.h2.quot.p.pull(H->tangent()).v});
	Cls chQ = chH_up - chern_character(Rat(B->dim), B->tangent());
	n.N = {B, X->dim, chern_from_character(chTXY + chQ).v};

	// admissibility of {Y, X x X^[2]}, reported clause by clause
	{
		bool ok = true;
		std::string w;
		Cls cN = n.N.chern_cls();
		for (int p = 1; p <= B->alg()->top && ok; ++p) {
			Cls cp = cN.part(p);
			if (cp.is_zero())
				continue;
			auto g = class_grades(n.h2.ckB, cp);
			if (!(g.empty() || g == std::vector<int>{0})) {
				ok = false;
				w = fmt::format("c_{}(N) off grade 0", p);
			}
		}
		n.report.add("nested23.admissible.normal_grade0", ok, w);
		ok = pure_grade0(graph(n.iY), n.h2.ckB, n.ckXH);
		n.report.add("nested23.admissible.inclusion_grade0", ok,
		             ok ? "" : "universal subscheme inclusion off grade 0");
	}

	n.bl = build_blow_up(n.XH.V, {{B, n.iY, n.N}}, fmt::format("{}^[2,3]", X->name));
	n.ck = n.bl.degenerate ? n.ckXH : ck_blow_up(n.ckXH, {&n.h2.ckB}, n.bl);

	// i^* pr_2^* = p^* on the quotient classes
	{
		Morphism c = compose(n.XH.p2, n.iY);
		n.report.add("nested23.i_pr2_consistency", c.pullback == n.h2.quot.p.pullback,
		             c.pullback == n.h2.quot.p.pullback ? "" : "i^* pr_2^* != p^*");
	}

	merge_prefixed(n.report, verify_ck(n.ck), "nested23");
	merge_prefixed(n.report, verify_multiplicative(n.ck), "nested23");
	merge_prefixed(n.report, verify_chern_grade(n.ck), "nested23");
	return n;
}

} // namespace mck

namespace mck {

namespace {

// pullback matrix of phi_ij : X x X -> X^3 (the repeated coordinate first)
Mat phi_pullback(const ProductData& XX, const ProductData& X0, int i1, int i2)
{
	VarP X = XX.X;
	const auto* A = X->alg();
	int nX = A->dim();
	Mat P(XX.V->rank(), X0.V->rank());
	for (int a = 0; a < nX; ++a)
		for (int b = 0; b < nX; ++b)
			for (int c = 0; c < nX; ++c) {
				int col = X0.pair_index(XX.pair_index(a, b), c);
				// phi_12^*(a x b x c) = (ab) x c, phi_13: (ac) x b, phi_23: (bc) x a
				SparseVec prod;
				int lone;
				if (i1 == 1 && i2 == 2) {
					prod = A->mul_basis(a, b);
					lone = c;
				} else if (i1 == 1 && i2 == 3) {
					prod = A->mul_basis(a, c);
					lone = b;
				} else {
					prod = A->mul_basis(b, c);
					lone = a;
				}
				for (auto& [k, v] : prod.t)
					P.at(XX.pair_index(k, lone), col) += v;
			}
	return P;
}

GroupActionData s3_on_cube(const ProductData& XX, const ProductData& X0)
{
	VarP X = XX.X;
	int nX = X->rank();
	// position maps sigma: slot m of the pullback receives factor sigma(m)
	const int perms[6][3] = {{0, 1, 2}, {1, 0, 2}, {0, 2, 1},
	                         {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
	const char* names[6] = {"e", "s12", "s23", "s13", "c123", "c132"};
	GroupActionData G;
	G.X = X0.V;
	for (int g = 0; g < 6; ++g) {
		Mat P(X0.V->rank(), X0.V->rank());
		for (int a = 0; a < nX; ++a)
			for (int b = 0; b < nX; ++b)
				for (int c = 0; c < nX; ++c) {
					int idx[3] = {a, b, c};
					int col = X0.pair_index(XX.pair_index(a, b), c);
					int row = X0.pair_index(
					    XX.pair_index(idx[perms[g][0]], idx[perms[g][1]]),
					    idx[perms[g][2]]);
					P.at(row, col) = 1;
				}
		G.names.push_back(names[g]);
		G.pullback.push_back(std::move(P));
	}
	return G;
}

// lift an action through a blow-up whose centers the action permutes; the
// permutation is recovered (and thereby certified) from the inclusions
GroupActionData lift_action(const GroupActionData& G, const BlowUpData& bu,
                            const std::vector<Morphism>& incl, Report& rep,
                            const std::string& stage)
{
	GroupActionData out;
	out.X = bu.Xt;
	out.names = G.names;
	int nX = bu.X->rank();
	int n = bu.Xt->rank();
	bool ok = true;
	std::string w;
	for (size_t g = 0; g < G.pullback.size(); ++g) {
		Mat P(n, n);
		for (int i = 0; i < nX; ++i)
			for (int j = 0; j < nX; ++j)
				P.at(i, j) = G.pullback[g].at(i, j);
		for (size_t c = 0; c < bu.centers.size(); ++c) {
			// find c' with incl_{c'}^* o g^* = incl_c^*
			int cp = -1;
			for (size_t u = 0; u < bu.centers.size(); ++u)
				if (mat_mul(incl[u].pullback, G.pullback[g]) == incl[c].pullback) {
					cp = int(u);
					break;
				}
			if (cp < 0) {
				ok = false;
				w = fmt::format("{}: element {} does not permute the centers", stage,
				                G.names[g]);
				break;
			}
			int nY = bu.centers[c].Y->rank();
			for (int l = 1; l <= bu.exc[c].r; ++l)
				for (int y = 0; y < nY; ++y)
					P.at(bu.exc_index(cp, l, y), bu.exc_index(int(c), l, y)) = 1;
		}
		out.pullback.push_back(std::move(P));
	}
	rep.add(fmt::format("{}.action_lift", stage), ok, w);
	return out;
}

} // namespace

TowerData build_tower(VarP X, const CKDecomposition& ckX)
{
	if (X->dim != 2)
		throw std::invalid_argument("build_tower: validated regime is dim X = 2");
	TowerData tw;
	tw.X = X;
	tw.ckX = ckX;
	Report& rep = tw.report;

	// ---- stage 0: X0 = X^3 with the product decomposition ----
	tw.XX = build_product(X, X, fmt::format("{}^2", X->name));
	tw.ckXX = ck_product(ckX, ckX, tw.XX);
	tw.X0 = build_product(tw.XX.V, X, fmt::format("{}^3", X->name));
	tw.ckX0 = ck_product(tw.ckXX, ckX, tw.X0);
	tw.diagXX = diagonal_morphism(tw.XX);
	tw.phi = {Morphism{tw.XX.V, tw.X0.V, phi_pullback(tw.XX, tw.X0, 1, 2)},
	          Morphism{tw.XX.V, tw.X0.V, phi_pullback(tw.XX, tw.X0, 1, 3)},
	          Morphism{tw.XX.V, tw.X0.V, phi_pullback(tw.XX, tw.X0, 2, 3)}};
	tw.s3_X0 = s3_on_cube(tw.XX, tw.X0);
	merge_prefixed(rep, tw.s3_X0.verify(), "X0");
	merge_prefixed(rep, verify_action_invariance(tw.ckX0, tw.s3_X0), "X0");

	// ---- stage 1: blow up the small diagonal ----
	Morphism diag3 = compose(tw.phi[0], tw.diagXX); // a x b x c -> abc
	Cls cT = X->tangent();
	BundleData N0{X, 2 * X->dim, (cT * cT).v};
	tw.bl1 = build_blow_up(tw.X0.V, {{X, diag3, N0}}, "X1");
	tw.ckE1 = ck_projective_bundle(ckX, tw.bl1.exc[0].pb);
	tw.ckX1 = ck_blow_up(tw.ckX0, {&ckX}, tw.bl1);
	tw.s3_X1 = lift_action(tw.s3_X0, tw.bl1, {diag3}, rep, "X1");
	merge_prefixed(rep, tw.s3_X1.verify(), "X1");
	merge_prefixed(rep, verify_action_invariance(tw.ckX1, tw.s3_X1), "X1");

	// ---- the big-diagonal model B = Bl_Delta(X x X) and P(T_X) ----
	tw.blB = build_blow_up(tw.XX.V, {{X, tw.diagXX, tangent_bundle(X)}}, "~Delta");
	tw.ckB = ck_blow_up(tw.ckXX, {&ckX}, tw.blB);
	tw.PT = tw.blB.exc[0].E;
	tw.ckPT = ck_projective_bundle(ckX, tw.blB.exc[0].pb);

	// strict transforms of the big diagonals inside X1
	for (int c = 0; c < 3; ++c) {
		StrictTransformSpec st;
		st.Z = tw.XX.V;
		st.iZ = tw.phi[c];
		st.Zt = &tw.blB;
		st.comp_map = {0};
		st.f = {identity_morphism(X)};
		tw.incl_Dij.push_back(strict_transform_inclusion(tw.bl1, st));
	}
	{
		// N_{~Delta_ij/X1} = ~p_1^* T_X (x) O(-E_Delta)
		Morphism p1rho = compose(tw.XX.p1, tw.blB.rho);
		Cls e = tw.blB.exceptional_divisor_class(0);
		Cls cENB = chern_twist_line(p1rho.pull(cT), X->dim, -e);
		tw.N_Dij = {tw.blB.Xt, X->dim, cENB.v};
	}

	// ---- stage 2: blow up the disjoint union of the ~Delta_ij ----
	tw.bl2 = build_blow_up(
	    tw.bl1.Xt,
	    {{tw.blB.Xt, tw.incl_Dij[0], tw.N_Dij},
	     {tw.blB.Xt, tw.incl_Dij[1], tw.N_Dij},
	     {tw.blB.Xt, tw.incl_Dij[2], tw.N_Dij}},
	    "X2");
	tw.ckX2 = ck_blow_up(tw.ckX1, {&tw.ckB, &tw.ckB, &tw.ckB}, tw.bl2);
	tw.s3_X2 = lift_action(tw.s3_X1, tw.bl2, tw.incl_Dij, rep, "X2");
	merge_prefixed(rep, tw.s3_X2.verify(), "X2");
	merge_prefixed(rep, verify_action_invariance(tw.ckX2, tw.s3_X2), "X2");

	// ---- W = P1 x P(T_X) inside E1 = P(T_X + T_X) ----
	tw.P1 = build_projective_space(1);
	tw.ckP1 = ck_cellular_standard(tw.P1);
	tw.W = build_product(tw.P1, tw.PT, "W");
	tw.ckW = ck_product(tw.ckP1, tw.ckPT, tw.W);

	VarP E1 = tw.bl1.exc[0].E;
	Morphism sPT = tw.blB.exc[0].pi; // P(T_X) -> X
	Cls zeta{tw.PT->alg(), tw.blB.exc[0].xi};
	Cls xi1 = tw.W.external(tw.P1->pt(), Cls::one(tw.PT->alg()));
	Cls zetaW = tw.W.external(Cls::one(tw.P1->alg()), zeta);
	Cls trel = tw.W.external(Cls::one(tw.P1->alg()),
	                         2 * zeta + sPT.pull(cT.part(1))); // c1(T_{P(T_X)/X})
	{
		// iota_W: O_{E1}(1)|_W = O_P1(1) x O_{P(T_X)}(1)
		int nX = X->rank();
		Mat P(tw.W.V->rank(), E1->rank());
		Cls base = xi1 + zetaW;
		for (int l = 0; l <= tw.bl1.exc[0].r; ++l)
			for (int i = 0; i < nX; ++i) {
				Cls col = base.pow(l) *
				          tw.W.external(Cls::one(tw.P1->alg()),
				                        sPT.pull(Cls::basis(X->alg(), i)));
				for (auto& [k, v] : col.v.t)
					P.at(k, tw.bl1.exc[0].pb.index(l, i)) = v;
			}
		tw.inclW_E1 = {tw.W.V, E1, P};
	}
	merge_prefixed(rep, verify_morphism(tw.inclW_E1), "W_in_E1");
	{
		// iota_* [W] = c_{d-1}(Q_1 (x) O_{E1}(1))
		Cls xiE1{E1->alg(), tw.bl1.exc[0].xi};
		Cls chQ1 = tw.bl1.exc[0].pi.pull(chern_character(Rat(X->dim), cT)) -
		           exp_class(-xiE1);
		Cls cQ1tw = chern_from_character(chQ1 * exp_class(xiE1));
		bool ok = tw.inclW_E1.push(Cls::one(tw.W.V->alg())) == cQ1tw.part(X->dim - 1);
		rep.add("X1.class_of_W", ok, ok ? "" : "[W] != c_{d-1}(Q_1 (x) O(1))");
	}

	for (int c = 0; c < 3; ++c) {
		// W_ij = {t_ij} x P(T_X) in W
		Mat P(tw.PT->rank(), tw.W.V->rank());
		for (int u = 0; u < tw.P1->rank(); ++u)
			for (int v = 0; v < tw.PT->rank(); ++v)
				if (u == tw.P1->alg()->unit)
					P.at(v, tw.W.pair_index(u, v)) = 1;
		tw.inclWij_W.push_back({tw.PT, tw.W.V, P});

		// W_ij = P(W_ij) inside P(T_X + T_X): a projective subbundle
		int nX = X->rank();
		Mat Q(tw.PT->rank(), E1->rank());
		for (int l = 0; l <= tw.bl1.exc[0].r; ++l)
			for (int i = 0; i < nX; ++i) {
				Cls col = zeta.pow(l) * sPT.pull(Cls::basis(X->alg(), i));
				for (auto& [k, v] : col.v.t)
					Q.at(k, tw.bl1.exc[0].pb.index(l, i)) = v;
			}
		tw.inclWij_E1.push_back({tw.PT, E1, Q});
	}
	{
		// consistency: W_ij -> W -> E1 equals the subbundle inclusion
		Morphism comp = compose(tw.inclW_E1, tw.inclWij_W[0]);
		rep.add("X1.Wij_compat", comp.pullback == tw.inclWij_E1[0].pullback,
		        comp.pullback == tw.inclWij_E1[0].pullback
		            ? ""
		            : "W_ij -> W -> E1 != subbundle inclusion");
	}

	// ---- W~ and its inclusion in X2 ----
	BundleData N_Wij_W{tw.PT, 1, SparseVec::unit(tw.PT->alg()->unit)};
	auto blWdeg = std::make_shared<BlowUpData>(build_blow_up(
	    tw.W.V,
	    {{tw.PT, tw.inclWij_W[0], N_Wij_W},
	     {tw.PT, tw.inclWij_W[1], N_Wij_W},
	     {tw.PT, tw.inclWij_W[2], N_Wij_W}},
	    "W~"));
	{
		StrictTransformSpec st;
		st.Z = tw.W.V;
		st.iZ = compose(tw.bl1.exc[0].j, tw.inclW_E1);
		st.Zt = blWdeg.get();
		st.comp_map = {0, 1, 2};
		st.f = {tw.blB.exc[0].j, tw.blB.exc[0].j, tw.blB.exc[0].j};
		tw.inclW_X2 = strict_transform_inclusion(tw.bl2, st);
	}
	merge_prefixed(rep, verify_morphism(tw.inclW_X2, false), "Wt_in_X2");

	// N_{W~/X2} = (p1^* O(-1) (x) p2^* T_{P(T_X)/X}) + (p1^* O(-1) (x) p2^* O(-1))
	Cls cN_Wt = (tw.W.V->one() - xi1 + trel) * (tw.W.V->one() - xi1 - zetaW);
	tw.N_Wt_X2 = {tw.W.V, 2, cN_Wt.v};
	{
		// cross-check against the strict-transform normal bundle route
		Cls cN_W_X1 = (tw.W.V->one() + 2 * xi1 + trel) * (tw.W.V->one() - xi1 - zetaW);
		BundleData NW_X1{tw.W.V, 2, cN_W_X1.v};
		Cls cN_Wij_X1 =
		    chern_twist_line(sPT.pull(cT), X->dim, zeta) * (tw.PT->one() - zeta);
		BundleData N_Wij_X1{tw.PT, 3, cN_Wij_X1.v};
		BundleData N_Wij_D{tw.PT, 1, (tw.PT->one() - zeta).v};
		BundleData NYZ = normal_excess_bundle(N_Wij_X1, N_Wij_D, N_Wij_W);
		BundleData viaLemma =
		    normal_bundle_of_strict_transform(*blWdeg, NW_X1, {NYZ, NYZ, NYZ});
		rep.add("X2.normal_ses_consistency", viaLemma.chern == tw.N_Wt_X2.chern,
		        viaLemma.chern == tw.N_Wt_X2.chern ? ""
		                                           : "(eq normal ses) disagrees with the lemma");
	}

	// ---- E1' = Bl_{U W_ij}(E1) and its inclusions ----
	BundleData N_Wij_E1{tw.PT, 2, chern_twist_line(sPT.pull(cT), X->dim, zeta).v};
	tw.blE1p = build_blow_up(E1,
	                         {{tw.PT, tw.inclWij_E1[0], N_Wij_E1},
	                          {tw.PT, tw.inclWij_E1[1], N_Wij_E1},
	                          {tw.PT, tw.inclWij_E1[2], N_Wij_E1}},
	                         "E1'");
	tw.ckE1p = ck_blow_up(tw.ckE1, {&tw.ckPT, &tw.ckPT, &tw.ckPT}, tw.blE1p);
	{
		StrictTransformSpec st;
		st.Z = E1;
		st.iZ = tw.bl1.exc[0].j;
		st.Zt = &tw.blE1p;
		st.comp_map = {0, 1, 2};
		st.f = {tw.blB.exc[0].j, tw.blB.exc[0].j, tw.blB.exc[0].j};
		tw.inclE1p_X2 = strict_transform_inclusion(tw.bl2, st);
	}
	merge_prefixed(rep, verify_morphism(tw.inclE1p_X2, false), "E1p_in_X2");

	// ---- stage 3: blow up W~ ----
	tw.bl3 = build_blow_up(tw.bl2.Xt, {{tw.W.V, tw.inclW_X2, tw.N_Wt_X2}}, "X3");
	tw.ckX3 = ck_blow_up(tw.ckX2, {&tw.ckW}, tw.bl3);
	tw.s3_X3 = lift_action(tw.s3_X2, tw.bl3, {tw.inclW_X2}, rep, "X3");
	merge_prefixed(rep, tw.s3_X3.verify(), "X3");
	merge_prefixed(rep, verify_action_invariance(tw.ckX3, tw.s3_X3), "X3");

	// E1'' = E1' (the center has codimension 1 in E1'), included into X3
	{
		// W~ -> E1': the strict transform of W inside Bl_{U W_ij}(E1)
		StrictTransformSpec stW;
		stW.Z = tw.W.V;
		stW.iZ = tw.inclW_E1;
		stW.Zt = blWdeg.get();
		stW.comp_map = {0, 1, 2};
		stW.f = {identity_morphism(tw.PT), identity_morphism(tw.PT),
		         identity_morphism(tw.PT)};
		Morphism inclW_E1p = strict_transform_inclusion(tw.blE1p, stW);

		Cls cN_Wt_E1p = tw.W.V->one() - xi1 + trel;
		BundleData N_Wt_E1p{tw.W.V, 1, cN_Wt_E1p.v};
		auto blE1pdeg = std::make_shared<BlowUpData>(
		    build_blow_up(tw.blE1p.Xt, {{tw.W.V, inclW_E1p, N_Wt_E1p}}, "E1''"));
		StrictTransformSpec st;
		st.Z = tw.blE1p.Xt;
		st.iZ = tw.inclE1p_X2;
		st.Zt = blE1pdeg.get();
		st.comp_map = {0};
		st.f = {identity_morphism(tw.W.V)};
		tw.inclE1p_X3 = strict_transform_inclusion(tw.bl3, st);
	}
	merge_prefixed(rep, verify_morphism(tw.inclE1p_X3, false), "E1pp_in_X3");

	// ---- verifier suites on every stage ----
	auto suite = [&](const CKDecomposition& ck, const std::string& name, bool assoc) {
		if (assoc)
			merge_prefixed(rep, ck.X->alg()->verify_axioms(true), name);
		merge_prefixed(rep, verify_ck(ck), name);
		merge_prefixed(rep, verify_multiplicative(ck), name);
		merge_prefixed(rep, verify_chern_grade(ck), name);
	};
	suite(tw.ckX0, "X0", false);
	suite(tw.ckX1, "X1", true);
	suite(tw.ckB, "B", true);
	suite(tw.ckPT, "PT", false);
	suite(tw.ckE1, "E1", false);
	suite(tw.ckW, "W", false);
	suite(tw.ckX2, "X2", true);
	suite(tw.ckE1p, "E1p", true);
	suite(tw.ckX3, "X3", true);

	// ---- admissible sets S0, S1, S2 ----
	{
		AdmissibleSet S0;
		S0.elems = {{"Delta123", X, &ckX},
		            {"Delta12", tw.XX.V, &tw.ckXX},
		            {"Delta13", tw.XX.V, &tw.ckXX},
		            {"Delta23", tw.XX.V, &tw.ckXX},
		            {"X0", tw.X0.V, &tw.ckX0}};
		BundleData NT = tangent_bundle(X);
		BundleData Np1{tw.XX.V, X->dim,
		               tw.XX.external(cT, Cls::one(X->alg())).v};
		for (int c = 0; c < 3; ++c) {
			S0.incls.push_back({0, c + 1, tw.diagXX, NT});
			S0.incls.push_back({c + 1, 4, tw.phi[c], Np1});
		}
		S0.incls.push_back({0, 4, diag3, N0});
		merge_prefixed(rep, validate_admissible(S0, false), "S0");
	}
	{
		AdmissibleSet S1;
		S1.elems = {{"X1", tw.bl1.Xt, &tw.ckX1}, {"E1", E1, &tw.ckE1},
		            {"D12~", tw.blB.Xt, &tw.ckB}, {"D13~", tw.blB.Xt, &tw.ckB},
		            {"D23~", tw.blB.Xt, &tw.ckB}, {"W", tw.W.V, &tw.ckW},
		            {"W12", tw.PT, &tw.ckPT},     {"W13", tw.PT, &tw.ckPT},
		            {"W23", tw.PT, &tw.ckPT}};
		Cls xiE1{E1->alg(), tw.bl1.exc[0].xi};
		BundleData N_E1{E1, 1, (Cls::one(E1->alg()) - xiE1).v};
		Cls cN_W_E1 = tw.W.V->one() + 2 * xi1 + trel;
		BundleData N_W_E1{tw.W.V, X->dim - 1, cN_W_E1.v};
		Cls cN_W_X1 = (tw.W.V->one() + 2 * xi1 + trel) * (tw.W.V->one() - xi1 - zetaW);
		BundleData N_W_X1{tw.W.V, X->dim, cN_W_X1.v};
		BundleData N_Wij_E1b{tw.PT, 2, chern_twist_line(sPT.pull(cT), X->dim, zeta).v};
		BundleData N_Wij_D{tw.PT, 1, (tw.PT->one() - zeta).v};
		S1.incls.push_back({1, 0, tw.bl1.exc[0].j, N_E1});
		for (int c = 0; c < 3; ++c)
			S1.incls.push_back({2 + c, 0, tw.incl_Dij[c], tw.N_Dij});
		S1.incls.push_back({5, 1, tw.inclW_E1, N_W_E1});
		S1.incls.push_back(
		    {5, 0, compose(tw.bl1.exc[0].j, tw.inclW_E1), N_W_X1});
		for (int c = 0; c < 3; ++c) {
			S1.incls.push_back({6 + c, 5, tw.inclWij_W[c], N_Wij_W});
			S1.incls.push_back({6 + c, 1, tw.inclWij_E1[c], N_Wij_E1b});
			S1.incls.push_back({6 + c, 2 + c, tw.blB.exc[0].j, N_Wij_D});
		}
		merge_prefixed(rep, validate_admissible(S1, false), "S1");
	}
	{
		AdmissibleSet S2;
		S2.elems = {{"X2", tw.bl2.Xt, &tw.ckX2},
		            {"E1'", tw.blE1p.Xt, &tw.ckE1p},
		            {"W~", tw.W.V, &tw.ckW}};
		Cls xiE1{E1->alg(), tw.bl1.exc[0].xi};
		BundleData N_E1p{tw.blE1p.Xt, 1,
		                 tw.blE1p.rho.pull(Cls::one(E1->alg()) - xiE1).v};
		Cls cN_Wt_E1p = tw.W.V->one() - xi1 + trel;
		BundleData N_Wt_E1p{tw.W.V, 1, cN_Wt_E1p.v};
		StrictTransformSpec stW;
		stW.Z = tw.W.V;
		stW.iZ = tw.inclW_E1;
		stW.Zt = blWdeg.get();
		stW.comp_map = {0, 1, 2};
		stW.f = {identity_morphism(tw.PT), identity_morphism(tw.PT),
		         identity_morphism(tw.PT)};
		Morphism inclW_E1p = strict_transform_inclusion(tw.blE1p, stW);
		S2.incls.push_back({1, 0, tw.inclE1p_X2, N_E1p});
		S2.incls.push_back({2, 0, tw.inclW_X2, tw.N_Wt_X2});
		S2.incls.push_back({2, 1, inclW_E1p, N_Wt_E1p});
		merge_prefixed(rep, validate_admissible(S2, false), "S2");
	}

	return tw;
}

} // namespace mck

namespace mck {

namespace {

// class on V x V in Kuenneth coordinates, with the convolution product
struct PClass {
	const GradedAlgebra* A = nullptr;
	Mat m;
};

PClass pclass_mul(const PClass& a, const PClass& b)
{
	const auto* A = a.A;
	PClass r{A, Mat(a.m.nr, a.m.nc)};
	for (int i = 0; i < a.m.nr; ++i)
		for (int j = 0; j < a.m.nc; ++j) {
			const Rat& x = a.m.at(i, j);
			if (is_zero(x))
				continue;
			for (int k = 0; k < b.m.nr; ++k) {
				if (A->codim[i] + A->codim[k] > A->top)
					continue;
				const SparseVec& pik = A->mul_basis(i, k);
				if (pik.empty())
					continue;
				for (int l = 0; l < b.m.nc; ++l) {
					const Rat& y = b.m.at(k, l);
					if (is_zero(y))
						continue;
					if (A->codim[j] + A->codim[l] > A->top)
						continue;
					const SparseVec& pjl = A->mul_basis(j, l);
					if (pjl.empty())
						continue;
					Rat xy = x * y;
					for (auto& [u, cu] : pik.t)
						for (auto& [v, cv] : pjl.t)
							r.m.at(u, v) += xy * cu * cv;
				}
			}
		}
	return r;
}

PClass pclass_p1(const Cls& g)
{
	const auto* A = g.A;
	PClass r{A, Mat(A->dim(), A->dim())};
	for (auto& [i, c] : g.v.t)
		r.m.at(i, A->unit) = c;
	return r;
}

PClass pclass_p2(const Cls& g)
{
	const auto* A = g.A;
	PClass r{A, Mat(A->dim(), A->dim())};
	for (auto& [i, c] : g.v.t)
		r.m.at(A->unit, i) = c;
	return r;
}

PClass pclass_part(const PClass& a, int p)
{
	PClass r{a.A, Mat(a.m.nr, a.m.nc)};
	for (int i = 0; i < a.m.nr; ++i)
		for (int j = 0; j < a.m.nc; ++j)
			if (a.A->codim[i] + a.A->codim[j] == p)
				r.m.at(i, j) = a.m.at(i, j);
	return r;
}

// inverse of 1 + higher-codimension terms, by total codimension
PClass pclass_series_invert(const PClass& s)
{
	const auto* A = s.A;
	PClass unit{A, Mat(A->dim(), A->dim())};
	unit.m.at(A->unit, A->unit) = 1;
	std::vector<PClass> inv(2 * A->top + 1, PClass{A, Mat(A->dim(), A->dim())});
	inv[0] = unit;
	PClass total = unit;
	for (int m = 1; m <= 2 * A->top; ++m) {
		PClass acc{A, Mat(A->dim(), A->dim())};
		for (int j = 1; j <= m; ++j) {
			PClass t = pclass_mul(pclass_part(s, j), inv[m - j]);
			acc.m += t.m;
		}
		acc.m *= Rat(-1);
		inv[m] = acc;
		total.m += acc.m;
	}
	return total;
}

// bivariate polynomial c0 + c1 x + c2 y + c11 x^2 + c12 xy + c22 y^2
struct Quad {
	Rat c0, c1, c2, c11, c12, c22;
	bool operator<(const Quad& o) const
	{
		auto t = [](const Quad& q) { return std::tie(q.c0, q.c1, q.c2, q.c11, q.c12, q.c22); };
		return t(*this) < t(o);
	}
	bool is_zero() const
	{
		return mck::is_zero(c0) && mck::is_zero(c1) && mck::is_zero(c2) &&
		       mck::is_zero(c11) && mck::is_zero(c12) && mck::is_zero(c22);
	}
	Rat eval(const Rat& x, const Rat& y) const
	{
		return c0 + c1 * x + c2 * y + c11 * x * x + c12 * x * y + c22 * y * y;
	}
};

// Solve the system {q = 0}: the linear equations determine the candidate,
// the quadratic ones certify it.
bool solve_quads(const std::vector<Quad>& eqs, Rat& x, Rat& y, std::string& why)
{
	// gather purely linear equations
	std::vector<Quad> lin;
	for (auto& q : eqs)
		if (is_zero(q.c11) && is_zero(q.c12) && is_zero(q.c22) &&
		    !(is_zero(q.c1) && is_zero(q.c2)))
			lin.push_back(q);
	for (size_t a = 0; a < lin.size(); ++a)
		for (size_t b = a; b < lin.size(); ++b) {
			Rat det = lin[a].c1 * lin[b].c2 - lin[a].c2 * lin[b].c1;
			if (is_zero(det))
				continue;
			x = (-lin[a].c0 * lin[b].c2 + lin[b].c0 * lin[a].c2) / det;
			y = (-lin[a].c1 * lin[b].c0 + lin[b].c1 * lin[a].c0) / det;
			for (auto& q : eqs)
				if (!is_zero(q.eval(x, y))) {
					why = "linear candidate fails a quadratic constraint";
					return false;
				}
			return true;
		}
	// fall back: one linear equation plus a quadratic one
	for (auto& l : lin) {
		for (auto& q : eqs) {
			if (is_zero(q.c11) && is_zero(q.c12) && is_zero(q.c22))
				continue;
			// substitute the line into the quadric; solve the rational roots
			// of a univariate quadratic with rational square discriminant
			Rat a1 = l.c1, a2 = l.c2, a0 = l.c0;
			// parametrize: if a2 != 0: y = -(a0 + a1 x)/a2
			if (is_zero(a2))
				continue;
			Rat A2 = q.c11 + (q.c22 * a1 * a1 - q.c12 * a1 * a2) / (a2 * a2);
			Rat A1 = q.c1 + (2 * q.c22 * a0 * a1 - q.c12 * a0 * a2) / (a2 * a2) -
			         q.c2 * a1 / a2;
			Rat A0 = q.c0 + q.c22 * a0 * a0 / (a2 * a2) - q.c2 * a0 / a2;
			std::vector<Rat> roots;
			if (is_zero(A2)) {
				if (!is_zero(A1))
					roots.push_back(-A0 / A1);
			} else {
				Rat disc = A1 * A1 - 4 * A2 * A0;
				if (sgn(disc) < 0)
					continue;
				// rational square root test
				mpz_class num = disc.get_num(), den = disc.get_den();
				mpz_class rn, rd;
				mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
				mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
				if (rn * rn != num || rd * rd != den)
					continue;
				Rat sq(rn, rd);
				sq.canonicalize();
				roots.push_back((-A1 + sq) / (2 * A2));
				roots.push_back((-A1 - sq) / (2 * A2));
			}
			for (auto& r : roots) {
				Rat yy = -(a0 + a1 * r) / a2;
				bool ok = true;
				for (auto& e : eqs)
					if (!is_zero(e.eval(r, yy))) {
						ok = false;
						break;
					}
				if (ok) {
					x = r;
					y = yy;
					return true;
				}
			}
		}
	}
	why = "no solution of the idempotency system";
	return false;
}

} // namespace

CubeDescentData build_descent(const TowerData& tw)
{
	CubeDescentData dd;
	Report& rep = dd.report;
	VarP X3 = tw.bl3.Xt;
	VarP X = tw.X;
	const auto* A3 = X3->alg();
	int d3 = X3->dim;
	Cls cT = X->tangent();

	// ---- dominating part: the graphs of S_3 ----
	std::vector<Correspondence> gammas;
	for (auto& P : tw.s3_X3.pullback)
		gammas.push_back(corr_from_action(X3, X3, inverse(P), d3));
	dd.domin = corr_zero(X3, X3, d3);
	for (auto& g : gammas)
		dd.domin += g;
	{
		Correspondence sq = compose(dd.domin, dd.domin);
		bool ok = sq == Rat(6) * dd.domin;
		rep.add("descent.group_algebra", ok, ok ? "" : "(sum Gamma_g)^2 != 6 sum Gamma_g");
	}

	// ---- geometry on the exceptional side ----
	VarP E1 = tw.bl1.exc[0].E;
	Morphism sPT = tw.blB.exc[0].pi; // P(T_X) -> X
	Cls zeta{tw.PT->alg(), tw.blB.exc[0].xi};
	Cls tPT = 2 * zeta + sPT.pull(cT.part(1)); // c1(T_{P(T_X)/X})
	Cls cEE = (tw.PT->one() + tPT) * (tw.PT->one() - zeta); // c(E) from (eq E ses)
	BundleData EE{tw.PT, 2, cEE.v};
	auto PE = build_projective_bundle(EE, "P(E)");
	CKDecomposition ckPE = ck_projective_bundle(tw.ckPT, PE);

	VarP EW = tw.bl3.exc[0].E; // P(N_{W~/X2}) over W = P1 x P(T_X)
	const auto* AEW = EW->alg();
	Cls xiEW{AEW, tw.bl3.exc[0].xi};
	Morphism piEW = tw.bl3.exc[0].pi; // EW -> W
	Cls xi1EW = piEW.pull(tw.W.external(tw.P1->pt(), Cls::one(tw.PT->alg())));

	// pr2 : EW = P1 x P(E) -> P(E); O_{P(E)}(1) pulls back to xi_EW - xi1
	Morphism pr2EW;
	{
		Mat P(EW->rank(), PE.P->rank());
		Cls zPE = xiEW - xi1EW;
		int nPT = tw.PT->rank();
		for (int l = 0; l <= PE.r; ++l)
			for (int i = 0; i < nPT; ++i) {
				Cls col = zPE.pow(l) *
				          piEW.pull(tw.W.external(Cls::one(tw.P1->alg()),
				                                  Cls::basis(tw.PT->alg(), i)));
				for (auto& [k, v] : col.v.t)
					P.at(k, PE.index(l, i)) = v;
			}
		pr2EW = {EW, PE.P, P};
	}
	merge_prefixed(rep, verify_morphism(pr2EW), "descent.EW_product");

	Mat Jw = tw.bl3.exc[0].jstar;
	Mat JwT = Jw.transposed();

	// C1 = [P1 x P1 x Delta_{P(E)}]
	{
		Mat inner = mat_mul(pr2EW.pullback,
		                    mat_mul(PE.P->alg()->gram_inv, pr2EW.pullback.transposed()));
		dd.C1 = make_correspondence(X3, X3, mat_mul(Jw, mat_mul(inner, JwT)), d3);
	}
	// C2 = [P1 x P1 x (V x_{B_3} V)] with V = P(T_{P(T_X)/X}) in P(E)
	{
		Cls zPE = PE.xi_cls();
		Cls w = zPE - PE.pi.pull(zeta); // [V]
		Morphism gPE = compose(sPT, PE.pi);
		Mat Mw(PE.P->rank(), X->rank());
		for (int k = 0; k < X->rank(); ++k) {
			Cls col = gPE.pull(Cls::basis(X->alg(), k)) * w;
			for (auto& [u, v] : col.v.t)
				Mw.at(u, k) = v;
		}
		Mat innerPE = mat_mul(Mw, mat_mul(X->alg()->gram_inv, Mw.transposed()));
		Mat inner = mat_mul(pr2EW.pullback, mat_mul(innerPE, pr2EW.pullback.transposed()));
		dd.C2 = make_correspondence(X3, X3, mat_mul(Jw, mat_mul(inner, JwT)), d3);
	}
	{
		bool ok = transpose(dd.C1) == dd.C1 && transpose(dd.C2) == dd.C2;
		rep.add("descent.C_symmetric", ok, ok ? "" : "C_i not symmetric");
		ok = true;
		for (auto& g : gammas)
			if (!(compose(g, dd.C1) == dd.C1) || !(compose(dd.C1, g) == dd.C1) ||
			    !(compose(g, dd.C2) == dd.C2) || !(compose(dd.C2, g) == dd.C2))
				ok = false;
		rep.add("descent.C_invariant", ok, ok ? "" : "Gamma_g does not fix C_i");
	}

	// ---- c(p^* T_{X^[3]}) via the relative cotangent assembly ----
	Cls clE1_X1 = tw.bl1.exceptional_divisor_class(0);
	Cls clE1p_X2 = tw.bl2.rho.pull(clE1_X1);
	Cls clEW = tw.bl3.exceptional_divisor_class(0);
	Cls clE1pp_X3 = tw.bl3.rho.pull(clE1p_X2) - clEW;
	std::vector<Cls> clEij_X3;
	for (int c = 0; c < 3; ++c)
		clEij_X3.push_back(tw.bl3.rho.pull(tw.bl2.exceptional_divisor_class(c)));

	Morphism fE1p = compose(tw.bl1.exc[0].pi, tw.blE1p.rho); // E1' -> X
	Cls chOmRel = Cls::zero(A3);

	// ramification along the ~E_ij: the conormal line bundles
	for (int c = 0; c < 3; ++c) {
		VarP Eij = tw.bl2.exc[c].E;
		Morphism tilde = compose(tw.inclW_X2, tw.inclWij_W[c]); // PT -> X2
		Cls xibar = -tilde.pull(tw.bl2.exceptional_divisor_class(c));
		Mat P(tw.PT->rank(), Eij->rank());
		int nB = tw.blB.Xt->rank();
		for (int l = 0; l <= tw.bl2.exc[c].r; ++l)
			for (int i = 0; i < nB; ++i) {
				Cls col = xibar.pow(l) *
				          Cls{tw.PT->alg(),
				              mat_apply(tw.blB.exc[0].j.pullback, SparseVec::unit(i))};
				for (auto& [k, v] : col.v.t)
					P.at(k, tw.bl2.exc[c].pb.index(l, i)) = v;
			}
		Morphism inclWtij_Eij{tw.PT, Eij, P};
		merge_prefixed(rep, verify_morphism(inclWtij_Eij, false),
		               fmt::format("descent.Wtij_in_E{}", c));

		auto Ztij = build_blow_up(Eij, {{tw.PT, inclWtij_Eij, EE}},
		                          fmt::format("~E{}", c));
		StrictTransformSpec st;
		st.Z = Eij;
		st.iZ = tw.bl2.exc[c].j;
		st.Zt = &Ztij;
		st.comp_map = {0};
		st.f = {tw.inclWij_W[c]};
		Morphism jEij = strict_transform_inclusion(tw.bl3, st);
		merge_prefixed(rep, verify_morphism(jEij, false),
		               fmt::format("descent.Et{}_in_X3", c));

		Cls n = jEij.pull(clEij_X3[c]);
		chOmRel += jEij.push(exp_class(-n) * todd_inverse_of_line(n));
	}

	// the contracted divisor E1'': Omega_{E1'/B_3} twisted down by the ~E_ij
	{
		Cls chOmE1p =
		    dual_character(chern_character(Rat(tw.blE1p.Xt->dim),
		                                   Cls{tw.blE1p.Xt->alg(),
		                                       tw.blE1p.Xt->tangent_chern})) -
		    fE1p.pull(dual_character(chern_character(Rat(X->dim), cT)));
		Cls a = Cls::zero(tw.blE1p.Xt->alg());
		for (int c = 0; c < 3; ++c)
			a += tw.inclE1p_X3.pull(clEij_X3[c]);
		Cls n = tw.inclE1p_X3.pull(clE1pp_X3);
		chOmRel += tw.inclE1p_X3.push((chOmE1p * exp_class(-a)) *
		                              todd_inverse_of_line(n));
	}

	// the contracted divisor E_W: Omega_{P1} plus the pushforward of
	// Omega_{V/B_3} from P(E), twisted down by E1'' and the ~E_ij
	{
		Mat PV(tw.PT->rank(), PE.P->rank());
		for (int l = 0; l <= PE.r; ++l)
			for (int i = 0; i < tw.PT->rank(); ++i) {
				Cls col = (-tPT).pow(l) * Cls::basis(tw.PT->alg(), i);
				for (auto& [k, v] : col.v.t)
					PV.at(k, PE.index(l, i)) = v;
			}
		Morphism jV{tw.PT, PE.P, PV};
		merge_prefixed(rep, verify_morphism(jV, false), "descent.V_in_PE");
		Cls wV = PE.xi_cls() - PE.pi.pull(zeta);
		{
			bool ok = jV.push(Cls::one(tw.PT->alg())) == wV;
			rep.add("descent.V_class", ok, ok ? "" : "[V] != xi - zeta");
		}
		Cls nV = jV.pull(wV);
		Cls chOmV = exp_class(-tPT); // Omega_{V/B_3} = Omega_{P(T_X)/X}
		Cls pushed = jV.push(chOmV * todd_inverse_of_line(nV));
		Cls chOmEW = exp_class(-2 * xi1EW) + pr2EW.pull(pushed);

		Cls b = tw.bl3.exc[0].j.pull(clE1pp_X3);
		for (int c = 0; c < 3; ++c)
			b += tw.bl3.exc[0].j.pull(clEij_X3[c]);
		Cls arg = (chOmEW * exp_class(-b)) * todd_inverse_of_line(-xiEW);
		chOmRel += tw.bl3.jstar_cls(0, arg);
	}

	Cls chT3 = chern_character(Rat(d3), Cls{A3, X3->tangent_chern});
	Cls chPullOmega = dual_character(chT3) - chOmRel;
	Cls cPullT = chern_from_character(dual_character(chPullOmega));
	dd.pullback_tangent = cPullT.v;
	{
		auto g = class_grades(tw.ckX3, cPullT - X3->one());
		bool ok = g.empty() || g == std::vector<int>{0};
		rep.add("descent.pullback_chern_grade0", ok,
		        ok ? "" : "c(p^* T) has grades beyond 0");
	}

	// ---- the exact excess term over B_3 ----
	{
		const auto* AE = tw.blE1p.Xt->alg();
		Mat Pf = fE1p.pullback;
		// [D1 x_X D1] = (f x f)^* Delta_X
		PClass fib{AE, mat_mul(Pf, mat_mul(X->alg()->gram_inv, Pf.transposed()))};

		Cls cND1 = tw.blE1p.Xt->one() + tw.inclE1p_X3.pull(clE1pp_X3);
		Cls cNp_D1 = tw.inclE1p_X3.pull(cPullT);
		{
			// c(N_p)|_{D1} is pulled back from B_3 = X
			SparseVec sol;
			bool ok = solve(Pf, cNp_D1.v, sol);
			if (ok) {
				SparseVec back = mat_apply(Pf, sol);
				ok = back == cNp_D1.v;
			}
			rep.add("descent.Np_from_B3", ok,
			        ok ? "" : "c(N_p)|_{D1} is not pulled back from B_3");
		}

		PClass cN1 = pclass_mul(
		    pclass_p1(fE1p.pull(cT)),
		    pclass_mul(pclass_p1(cND1), pclass_p2(cND1)));
		PClass excess = pclass_mul(pclass_p1(cNp_D1), pclass_series_invert(cN1));
		PClass arg = pclass_mul(fib, pclass_part(excess, 2));
		Mat push = tw.inclE1p_X3.pushforward_matrix();
		dd.T1 = make_correspondence(X3, X3, mat_mul(push, mat_mul(arg.m, push.transposed())),
		                            d3);
	}
	{
		bool ok = transpose(dd.T1) == dd.T1;
		rep.add("descent.T1_symmetric", ok, ok ? "" : "T1 not symmetric");
		ok = true;
		for (auto& g : gammas)
			if (!(compose(g, dd.T1) == dd.T1) || !(compose(dd.T1, g) == dd.T1))
				ok = false;
		rep.add("descent.T1_invariant", ok, ok ? "" : "Gamma_g does not fix T1");
	}

	// lemma hypotheses: the fiber-product components are of pure grade 0
	{
		CKDecomposition ckEW = ck_projective_bundle(tw.ckW, tw.bl3.exc[0].pb);
		Mat innerC1 = mat_mul(pr2EW.pullback,
		                      mat_mul(PE.P->alg()->gram_inv, pr2EW.pullback.transposed()));
		auto g1 = product_class_grades(innerC1, EW->dim - 1, ckEW, ckEW);
		Morphism fE1pX = fE1p;
		Mat fibm = mat_mul(fE1pX.pullback,
		                   mat_mul(X->alg()->gram_inv, fE1pX.pullback.transposed()));
		auto g2 = product_class_grades(fibm, X->dim, tw.ckE1p, tw.ckE1p);
		bool ok = (g1.empty() || g1 == std::vector<int>{0}) &&
		          (g2.empty() || g2 == std::vector<int>{0});
		rep.add("descent.components_grade0", ok,
		        ok ? "" : "a fiber-product component is off grade 0");
	}

	// ---- determine the undetermined coefficients from idempotency ----
	Correspondence Acst = dd.domin + dd.T1;
	Correspondence AA = compose(Acst, Acst);
	Correspondence L1m = compose(Acst, dd.C1) + compose(dd.C1, Acst) - Rat(6) * dd.C1;
	Correspondence L2m = compose(Acst, dd.C2) + compose(dd.C2, Acst) - Rat(6) * dd.C2;
	Correspondence Q11 = compose(dd.C1, dd.C1);
	Correspondence Q12 = compose(dd.C1, dd.C2) + compose(dd.C2, dd.C1);
	Correspondence Q22 = compose(dd.C2, dd.C2);
	Correspondence K0 = AA - Rat(6) * Acst;
	{
		std::vector<Quad> eqs;
		std::set<std::array<std::string, 6>> seen;
		for (int i = 0; i < A3->dim(); ++i)
			for (int j = 0; j < A3->dim(); ++j) {
				Quad q{K0.coeff.at(i, j),  L1m.coeff.at(i, j), L2m.coeff.at(i, j),
				       Q11.coeff.at(i, j), Q12.coeff.at(i, j), Q22.coeff.at(i, j)};
				if (q.is_zero())
					continue;
				std::array<std::string, 6> key{to_string(q.c0),  to_string(q.c1),
				                               to_string(q.c2),  to_string(q.c11),
				                               to_string(q.c12), to_string(q.c22)};
				if (seen.insert(key).second)
					eqs.push_back(q);
			}
		std::string why;
		bool ok = solve_quads(eqs, dd.lambda1, dd.lambda2, why);
		rep.add("descent.coefficients", ok,
		        ok ? fmt::format("lambda = ({}, {})", to_string(dd.lambda1),
		                         to_string(dd.lambda2))
		           : why);
		if (!ok)
			return dd;
	}

	dd.K = Acst + dd.lambda1 * dd.C1 + dd.lambda2 * dd.C2;
	dd.q = rat(1, 6) * dd.K;
	{
		bool ok = compose(dd.q, dd.q) == dd.q;
		rep.add("descent.q_idempotent", ok, ok ? "" : "q^2 != q");
		ok = transpose(dd.q) == dd.q;
		rep.add("descent.q_selfadjoint", ok, ok ? "" : "tq != q");
		ok = true;
		for (auto& g : gammas)
			if (!(compose(g, dd.q) == dd.q) || !(compose(dd.q, g) == dd.q))
				ok = false;
		rep.add("descent.q_absorbs_group", ok, ok ? "" : "Gamma_g q != q");
		ok = true;
		for (int i = 0; i <= tw.ckX3.top(); ++i)
			if (!(compose(dd.q, tw.ckX3.proj(i)) == compose(tw.ckX3.proj(i), dd.q)))
				ok = false;
		rep.add("descent.q_grade0", ok, ok ? "" : "q does not commute with the projectors");
	}

	// ---- the Hilbert cube ----
	Mat qact = dd.q.action_matrix();
	dd.img = build_idempotent_image(X3, qact, 6, dd.pullback_tangent,
	                                fmt::format("{}^[3]", X->name));
	dd.ck = ck_descend(tw.ckX3, dd.img);
	{
		rep.add("descent.trace", trace(qact) == 22,
		        fmt::format("trace(q) = {}", to_string(trace(qact))));
		// chi consistency: deg c_top(p^* T) = |G| chi(X^[3])
		Rat chi = Cls{A3, dd.pullback_tangent}.part(A3->top).deg();
		rep.add("descent.chi_consistency", chi == 6 * trace(qact),
		        fmt::format("deg c_top(p^*T) = {}", to_string(chi)));
	}
	merge_prefixed(rep, dd.img.Y->alg()->verify_axioms(true), "cube");
	merge_prefixed(rep, verify_ck(dd.ck), "cube");
	merge_prefixed(rep, verify_multiplicative(dd.ck), "cube");
	merge_prefixed(rep, verify_chern_grade(dd.ck), "cube");
	{
		auto ranks = dd.img.Y->codim_ranks();
		bool ok = true;
		for (size_t i = 0; i < ranks.size(); ++i)
			if (ranks[i] != ranks[ranks.size() - 1 - i])
				ok = false;
		rep.add("cube.betti_palindromic", ok, ok ? "" : "graded ranks not palindromic");
	}
	return dd;
}

} // namespace mck
