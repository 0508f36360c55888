#include "mck/ckd.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace mck {

const Mat& CKDecomposition::action(int i) const
{
	if (action_cache.empty()) {
		action_cache.reserve(pi.size());
		for (auto& p : pi)
			action_cache.push_back(p.action_matrix());
	}
	return action_cache.at(i);
}

CKDecomposition ck_cellular_standard(VarP X)
{
	const auto* A = X->alg();
	CKDecomposition ck;
	ck.X = X;
	ck.provenance = "standard";
	for (int i = 0; i <= 2 * X->dim; ++i) {
		Mat act(A->dim(), A->dim());
		if (i % 2 == 0 && i / 2 <= A->top)
			for (int b : A->slots[i / 2])
				act.at(b, b) = 1;
		ck.pi.push_back(corr_from_action(X, X, act, X->dim));
	}
	return ck;
}

CKDecomposition ck_product(const CKDecomposition& A, const CKDecomposition& B,
                           const ProductData& P)
{
	if (A.X != P.X || B.X != P.Y)
		throw std::invalid_argument("ck_product: factors mismatch");
	CKDecomposition ck;
	ck.X = P.V;
	ck.provenance = "product";
	for (int k = 0; k <= 2 * P.V->dim; ++k) {
		Correspondence acc = corr_zero(P.V, P.V, P.V->dim);
		for (int i = 0; i <= 2 * A.X->dim; ++i) {
			int j = k - i;
			if (j < 0 || j > 2 * B.X->dim)
				continue;
			if (A.proj(i).is_zero() || B.proj(j).is_zero())
				continue;
			acc += tensor(A.proj(i), B.proj(j), P, P);
		}
		ck.pi.push_back(std::move(acc));
	}
	return ck;
}

namespace {

BlockCorrespondence diag_blocks(const MotiveSum& sum, const std::vector<Correspondence>& entries)
{
	auto b = BlockCorrespondence::zero(sum, sum);
	for (size_t s = 0; s < sum.size(); ++s)
		b.set(int(s), int(s), entries[s]);
	return b;
}

} // namespace

ManinMachine manin_projective_bundle(const PBundleData& pb)
{
	VarP X = pb.E.carrier;
	VarP P = pb.P;
	int r = pb.r;

	ManinMachine mm;
	for (int l = 0; l <= r; ++l)
		mm.sum.push_back({X, l});

	// gamma_0 = c_r(pi^* E / O(-1)) = sum pi^* c_i(E) xi^{r-i}
	Cls xi = pb.xi_cls();
	Cls cE = pb.pi.pull(pb.E.chern_cls());
	Cls gamma0 = Cls::zero(P->alg());
	for (int i = 0; i <= r; ++i)
		gamma0 += cE.part(i) * xi.pow(r - i);
	// xi . gamma_0 = -pi^* c_{r+1}(E)
	if (!(xi * gamma0 == -pb.pi.pull(pb.E.chern_cls().part(r + 1))))
		throw std::logic_error("manin_projective_bundle: gamma_0 relation fails");

	Correspondence tpi = cograph(pb.pi);
	Correspondence h = intersect_with(xi, P);
	Correspondence gamma = intersect_with(gamma0, P);

	MotiveSum tgt{{P, 0}};
	mm.Phi = BlockCorrespondence::zero(mm.sum, tgt);
	Correspondence pw = identity_corr(P);
	for (int l = 0; l <= r; ++l) {
		if (l == r)
			mm.Phi.set(r, 0, compose(gamma, tpi));
		else
			mm.Phi.set(l, 0, compose(pw, tpi));
		if (l < r)
			pw = compose(h, pw);
	}

	std::vector<int> pairing(r + 1);
	for (int l = 0; l <= r; ++l)
		pairing[l] = r - l;
	mm.M = block_compose(manin_dual(mm.Phi, pairing), mm.Phi);
	std::vector<Correspondence> ident(r + 1, identity_corr(X));
	mm.D = diag_blocks(mm.sum, ident);
	mm.eta = mm.M - BlockCorrespondence::identity(mm.sum);
	mm.Psi = block_compose(mm.Phi, block_binomial(mm.eta, rat(-1, 2)));
	mm.Psi_inv = block_compose(mm.D, manin_dual(mm.Psi, pairing));
	if (!(block_compose(mm.Psi_inv, mm.Psi) == BlockCorrespondence::identity(mm.sum)))
		throw std::logic_error("manin_projective_bundle: Psi^{-1} Psi != id");
	return mm;
}

ManinMachine manin_blow_up(const BlowUpData& bu)
{
	if (bu.degenerate)
		throw std::invalid_argument("manin_blow_up: degenerate blow-up");
	VarP X = bu.X;
	VarP Xt = bu.Xt;

	ManinMachine mm;
	mm.sum.push_back({X, 0});
	for (size_t c = 0; c < bu.centers.size(); ++c)
		for (int l = 1; l <= bu.exc[c].r; ++l)
			mm.sum.push_back({bu.centers[c].Y, l});

	MotiveSum tgt{{Xt, 0}};
	mm.Phi = BlockCorrespondence::zero(mm.sum, tgt);
	mm.Phi.set(0, 0, cograph(bu.rho));
	std::vector<Correspondence> dents{identity_corr(X)};
	int slot = 1;
	for (size_t c = 0; c < bu.centers.size(); ++c) {
		const auto& e = bu.exc[c];
		// h = -tGamma_j Gamma_j; acts by intersecting with xi
		Correspondence gj = graph(e.j);
		Correspondence h = Rat(-1) * compose(transpose(gj), gj);
		if (!(h == intersect_with(Cls{e.E->alg(), e.xi}, e.E)))
			throw std::logic_error("manin_blow_up: h != . xi");
		Correspondence tpi = cograph(e.pi);
		Correspondence pw = tpi;
		for (int l = 1; l <= e.r; ++l) {
			mm.Phi.set(slot++, 0, compose(gj, pw));
			dents.push_back(Rat(-1) * identity_corr(bu.centers[c].Y));
			pw = compose(h, pw);
		}
	}

	// sigma fixes the X slot and reflects the twist within each component
	std::vector<int> pairing(mm.sum.size());
	pairing[0] = 0;
	{
		int base = 1;
		for (size_t c = 0; c < bu.centers.size(); ++c) {
			int rc = bu.exc[c].r;
			for (int l = 1; l <= rc; ++l)
				pairing[base + l - 1] = base + (rc + 1 - l) - 1;
			base += rc;
		}
	}
	mm.M = block_compose(manin_dual(mm.Phi, pairing), mm.Phi);
	mm.D = diag_blocks(mm.sum, dents);
	mm.eta = block_compose(mm.D, mm.M) - BlockCorrespondence::identity(mm.sum);
	mm.Psi = block_compose(mm.Phi, block_binomial(mm.eta, rat(-1, 2)));
	mm.Psi_inv = block_compose(mm.D, manin_dual(mm.Psi, pairing));
	if (!(block_compose(mm.Psi_inv, mm.Psi) == BlockCorrespondence::identity(mm.sum)))
		throw std::logic_error("manin_blow_up: Psi^{-1} Psi != id");
	return mm;
}

CKDecomposition ck_projective_bundle(const CKDecomposition& base, const PBundleData& pb)
{
	if (base.X != pb.E.carrier)
		throw std::invalid_argument("ck_projective_bundle: base mismatch");
	ManinMachine mm = manin_projective_bundle(pb);
	int r = pb.r;
	CKDecomposition ck;
	ck.X = pb.P;
	ck.provenance = "projbundle";
	for (int i = 0; i <= 2 * pb.P->dim; ++i) {
		auto mid = BlockCorrespondence::zero(mm.sum, mm.sum);
		for (int j = 0; j <= r; ++j) {
			int k = i - 2 * j;
			if (k < 0 || k > base.top())
				continue;
			if (!base.proj(k).is_zero())
				mid.set(j, j, base.proj(k));
		}
		auto blk = block_compose(mm.Psi, block_compose(mid, mm.Psi_inv));
		const Correspondence* e = blk.get(0, 0);
		ck.pi.push_back(e ? *e : corr_zero(pb.P, pb.P, pb.P->dim));
	}
	return ck;
}

CKDecomposition ck_blow_up(const CKDecomposition& ckX,
                           const std::vector<const CKDecomposition*>& ckY,
                           const BlowUpData& bu)
{
	if (ckX.X != bu.X || ckY.size() != bu.centers.size())
		throw std::invalid_argument("ck_blow_up: inputs mismatch");
	for (size_t c = 0; c < ckY.size(); ++c)
		if (ckY[c]->X != bu.centers[c].Y)
			throw std::invalid_argument("ck_blow_up: center decomposition mismatch");
	ManinMachine mm = manin_blow_up(bu);
	CKDecomposition ck;
	ck.X = bu.Xt;
	ck.provenance = "blowup";
	for (int i = 0; i <= 2 * bu.Xt->dim; ++i) {
		auto mid = BlockCorrespondence::zero(mm.sum, mm.sum);
		if (i <= ckX.top() && !ckX.proj(i).is_zero())
			mid.set(0, 0, ckX.proj(i));
		int slot = 1;
		for (size_t c = 0; c < bu.centers.size(); ++c)
			for (int l = 1; l <= bu.exc[c].r; ++l, ++slot) {
				int k = i - 2 * l;
				if (k < 0 || k > ckY[c]->top())
					continue;
				if (!ckY[c]->proj(k).is_zero())
					mid.set(slot, slot, ckY[c]->proj(k));
			}
		auto blk = block_compose(mm.Psi, block_compose(mid, mm.Psi_inv));
		const Correspondence* e = blk.get(0, 0);
		ck.pi.push_back(e ? *e : corr_zero(bu.Xt, bu.Xt, bu.Xt->dim));
	}
	return ck;
}

CKDecomposition ck_descend(const CKDecomposition& ckX, const IdempotentImageData& dd)
{
	if (ckX.X != dd.p.source)
		throw std::invalid_argument("ck_descend: decomposition not on the source");
	Correspondence gp = graph(dd.p);
	Correspondence tgp = transpose(gp);
	Correspondence K = compose(tgp, gp);
	for (int i = 0; i <= ckX.top(); ++i)
		if (!(compose(K, ckX.proj(i)) == compose(ckX.proj(i), K)))
			throw std::domain_error(
			    "ck_descend: tGamma_p Gamma_p does not commute with the projectors");
	if (!(compose(gp, tgp) == dd.N * identity_corr(dd.Y)))
		throw std::domain_error("ck_descend: Gamma_p tGamma_p != N Delta_Y");
	CKDecomposition ck;
	ck.X = dd.Y;
	ck.provenance = "descent";
	for (int i = 0; i <= ckX.top(); ++i)
		ck.pi.push_back((1 / dd.N) * compose(gp, compose(ckX.proj(i), tgp)));
	return ck;
}

Report verify_ck(const CKDecomposition& ck)
{
	Report rep;
	const auto* A = ck.X->alg();
	int d = ck.X->dim;

	{
		Correspondence sum = corr_zero(ck.X, ck.X, d);
		for (auto& p : ck.pi)
			sum += p;
		bool ok = sum == identity_corr(ck.X);
		rep.add("ck.sum_diagonal", ok, ok ? "" : "sum of projectors is not the diagonal");
	}
	{
		bool ok = true;
		std::string w;
		for (int i = 0; i <= ck.top() && ok; ++i) {
			Correspondence sq = compose(ck.proj(i), ck.proj(i));
			if (!(sq == ck.proj(i))) {
				ok = false;
				Mat diff = sq.coeff - ck.proj(i).coeff;
				for (int a = 0; a < diff.nr && w.empty(); ++a)
					for (int b = 0; b < diff.nc; ++b)
						if (!is_zero(diff.at(a, b))) {
							w = fmt::format("pi[{}]^2 - pi[{}] has ({},{}) = {}", i, i,
							                A->names[a], A->names[b],
							                to_string(diff.at(a, b)));
							break;
						}
			}
		}
		rep.add("ck.idempotent", ok, w);
	}
	{
		bool ok = true;
		std::string w;
		for (int i = 0; i <= ck.top() && ok; ++i)
			for (int j = 0; j <= ck.top(); ++j) {
				if (i == j)
					continue;
				if (!compose(ck.proj(i), ck.proj(j)).is_zero()) {
					ok = false;
					w = fmt::format("pi[{}] o pi[{}] != 0", i, j);
					break;
				}
			}
		rep.add("ck.orthogonal", ok, w);
	}
	{
		bool ok = true;
		std::string w;
		for (int i = 0; i <= ck.top(); ++i)
			if (!(transpose(ck.proj(i)) == ck.proj(2 * d - i))) {
				ok = false;
				w = fmt::format("t pi[{}] != pi[{}]", i, 2 * d - i);
				break;
			}
		rep.add("ck.self_dual", ok, w);
	}
	{
		bool ok = true;
		std::string w;
		for (int i = 1; i <= ck.top(); i += 2)
			if (!ck.proj(i).is_zero()) {
				ok = false;
				w = fmt::format("pi[{}] != 0 on a variety with trivial odd part", i);
				break;
			}
		for (int p = 0; p <= A->top && ok; ++p)
			for (int b : A->slots[p]) {
				if (!(mat_apply(ck.action(2 * p), SparseVec::unit(b)) == SparseVec::unit(b))) {
					ok = false;
					w = fmt::format("pi[{}] is not the identity on {}", 2 * p, A->names[b]);
					break;
				}
			}
		rep.add("ck.kunneth_lift", ok, w);
	}
	return rep;
}

Report verify_multiplicative(const CKDecomposition& ck)
{
	Report rep;
	int d = ck.X->dim;
	Tensor3 T = small_diagonal3(ck.X);
	std::vector<int> live;
	for (int i = 0; i <= ck.top(); ++i)
		if (!ck.proj(i).is_zero())
			live.push_back(i);
	bool ok = true;
	std::string w;
	const auto* A = ck.X->alg();
	Mat id = Mat::identity(A->dim());
	for (int k : live) {
		Tensor3 Tk = apply3(ck.action(k), id, id, T, A);
		for (int i : live) {
			Tensor3 Tki = apply3(id, ck.action(i), id, Tk, A);
			for (int j : live) {
				if (i + j + k == 4 * d)
					continue;
				Tensor3 r = apply3(id, id, ck.action(j), Tki, A);
				if (!r.is_zero()) {
					ok = false;
					if (w.empty())
						w = fmt::format(
						    "(pi[{}] (x) pi[{}] (x) pi[{}])_* Delta_123 != 0", k, i, j);
				}
			}
		}
	}
	rep.add("ck.multiplicative", ok, w);
	return rep;
}

Report verify_chern_grade(const CKDecomposition& ck)
{
	Report rep;
	bool ok = true;
	std::string w;
	Cls cT = ck.X->tangent();
	for (int p = 1; p <= ck.X->alg()->top && ok; ++p) {
		Cls cp = cT.part(p);
		if (cp.is_zero())
			continue;
		auto g = class_grades(ck, cp);
		if (!(g.empty() || g == std::vector<int>{0})) {
			ok = false;
			w = fmt::format("c_{}(T) has grades beyond 0", p);
		}
	}
	rep.add("ck.chern_grade0", ok, w);
	return rep;
}

Report verify_action_invariance(const CKDecomposition& ck, const GroupActionData& G)
{
	Report rep;
	bool ok = true;
	std::string w;
	for (size_t g = 0; g < G.pullback.size() && ok; ++g) {
		// Gamma_g acts by (g^{-1})^* = g_*; invariance == commutation
		Mat act = inverse(G.pullback[g]);
		Correspondence gg = corr_from_action(ck.X, ck.X, act, ck.X->dim);
		for (int i = 0; i <= ck.top(); ++i)
			if (!(compose(gg, ck.proj(i)) == compose(ck.proj(i), gg))) {
				ok = false;
				w = fmt::format("Gamma_{} does not commute with pi[{}]", G.names[g], i);
				break;
			}
	}
	rep.add("ck.group_invariant", ok, w);
	return rep;
}

std::vector<int> class_grades(const CKDecomposition& ck, const Cls& a)
{
	const auto* A = ck.X->alg();
	std::vector<int> out;
	for (int p = 0; p <= A->top; ++p) {
		Cls ap = a.part(p);
		if (ap.is_zero())
			continue;
		for (int i = 0; i <= ck.top(); ++i) {
			if (ck.proj(i).is_zero())
				continue;
			SparseVec img = mat_apply(ck.action(i), ap.v);
			if (!img.empty()) {
				int s = 2 * p - i;
				if (std::find(out.begin(), out.end(), s) == out.end())
					out.push_back(s);
			}
		}
	}
	std::sort(out.begin(), out.end());
	return out;
}

std::vector<int> product_class_grades(const Mat& cls, int codim, const CKDecomposition& src,
                                      const CKDecomposition& tgt)
{
	std::vector<int> out;
	for (int i = 0; i <= src.top(); ++i) {
		if (src.proj(i).is_zero())
			continue;
		Mat li = mat_mul(src.action(i), cls);
		if (li.is_zero())
			continue;
		for (int j = 0; j <= tgt.top(); ++j) {
			if (tgt.proj(j).is_zero())
				continue;
			Mat r = mat_mul(li, tgt.action(j).transposed());
			if (!r.is_zero()) {
				int s = 2 * codim - i - j;
				if (std::find(out.begin(), out.end(), s) == out.end())
					out.push_back(s);
			}
		}
	}
	std::sort(out.begin(), out.end());
	return out;
}

std::vector<int> corr_grades(const Correspondence& g, const CKDecomposition& src,
                             const CKDecomposition& tgt)
{
	if (g.src != src.X || g.tgt != tgt.X)
		throw std::invalid_argument("corr_grades: decomposition mismatch");
	return product_class_grades(g.coeff, g.codim, src, tgt);
}

bool pure_grade0(const Correspondence& g, const CKDecomposition& src, const CKDecomposition& tgt)
{
	auto gr = corr_grades(g, src, tgt);
	return gr.empty() || gr == std::vector<int>{0};
}

Report validate_admissible(const AdmissibleSet& S, bool full_ck_suite)
{
	Report rep;
	for (auto& e : S.elems) {
		if (full_ck_suite) {
			Report r = verify_ck(*e.ck);
			r.merge(verify_multiplicative(*e.ck));
			for (auto& c : r.checks)
				rep.add(fmt::format("admissible[{}].{}", e.name, c.id), c.pass, c.witness);
		}
	}
	for (auto& inc : S.incls) {
		const auto& sub = S.elems[inc.sub];
		const auto& sup = S.elems[inc.sup];
		bool ok = true;
		std::string w;
		Cls cN = inc.normal.chern_cls();
		for (int p = 1; p <= sub.V->alg()->top && ok; ++p) {
			Cls cp = cN.part(p);
			if (cp.is_zero())
				continue;
			auto g = class_grades(*sub.ck, cp);
			if (!(g.empty() || g == std::vector<int>{0})) {
				ok = false;
				w = fmt::format("c_{}(N) off grade 0", p);
			}
		}
		rep.add(fmt::format("admissible[{}<{}].normal_grade0", sub.name, sup.name), ok, w);

		ok = pure_grade0(graph(inc.incl), *sub.ck, *sup.ck);
		rep.add(fmt::format("admissible[{}<{}].inclusion_grade0", sub.name, sup.name), ok,
		        ok ? "" : "graph of the inclusion is not of pure grade 0");
	}
	return rep;
}

} // namespace mck
