#include "mck/variety.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

namespace mck {

Cls Variety::gen(const std::string& n) const
{
	for (auto& [g, v] : gens)
		if (g == n)
			return {alg(), v};
	throw std::invalid_argument(fmt::format("variety '{}': unknown class '{}'", name, n));
}

std::vector<int> Variety::codim_ranks() const
{
	std::vector<int> r(chow->top + 1);
	for (int p = 0; p <= chow->top; ++p)
		r[p] = int(chow->slots[p].size());
	return r;
}

Cls Morphism::pull(const Cls& a) const
{
	if (a.A != target->alg())
		throw std::invalid_argument("Morphism::pull: class not on target");
	return {source->alg(), mat_apply(pullback, a.v)};
}

Mat Morphism::pushforward_matrix() const
{
	// adjoint: <f_* a, b> = <a, f^* b>
	return mat_mul(target->alg()->gram_inv, mat_mul(pullback.transposed(), source->alg()->gram));
}

Cls Morphism::push(const Cls& a) const
{
	if (a.A != source->alg())
		throw std::invalid_argument("Morphism::push: class not on source");
	return {target->alg(), mat_apply(pushforward_matrix(), a.v)};
}

Morphism identity_morphism(VarP X)
{
	return {X, X, Mat::identity(X->rank())};
}

Morphism compose(const Morphism& g, const Morphism& f)
{
	if (f.target != g.source)
		throw std::invalid_argument("compose: middle variety mismatch");
	return {f.source, g.target, mat_mul(f.pullback, g.pullback)};
}

Report verify_morphism(const Morphism& f, bool projection_formula)
{
	Report rep;
	const auto* S = f.source->alg();
	const auto* T = f.target->alg();

	bool ok = mat_apply(f.pullback, SparseVec::unit(T->unit)) == SparseVec::unit(S->unit);
	rep.add("morphism.unit", ok, ok ? "" : "f^* 1 != 1");

	ok = true;
	std::string w;
	for (int a = 0; a < T->dim() && ok; ++a)
		for (int b = a; b < T->dim(); ++b) {
			if (T->codim[a] + T->codim[b] > T->top)
				continue;
			SparseVec lhs = mat_apply(f.pullback, T->mul_basis(a, b));
			SparseVec rhs = S->mul(f.pullback.col_sparse(a), f.pullback.col_sparse(b));
			if (!(lhs == rhs)) {
				ok = false;
				w = fmt::format("f^*({}*{}) != f^*{} * f^*{}", T->names[a], T->names[b],
				                T->names[a], T->names[b]);
				break;
			}
		}
	rep.add("morphism.ring_hom", ok, w);

	if (projection_formula) {
		Mat push = f.pushforward_matrix();
		ok = true;
		w.clear();
		for (int x = 0; x < S->dim() && ok; ++x)
			for (int b = 0; b < T->dim(); ++b) {
				if (S->codim[x] + T->codim[b] > S->top)
					continue;
				SparseVec lhs =
				    mat_apply(push, S->mul(SparseVec::unit(x), f.pullback.col_sparse(b)));
				SparseVec rhs =
				    T->mul(mat_apply(push, SparseVec::unit(x)), SparseVec::unit(b));
				if (!(lhs == rhs)) {
					ok = false;
					w = fmt::format("projection formula fails at ({}, {})", S->names[x],
					                T->names[b]);
					break;
				}
			}
		rep.add("morphism.projection_formula", ok, w);
	}
	return rep;
}

BundleData tangent_bundle(VarP X)
{
	return {X, X->dim, X->tangent_chern};
}

VarP build_point()
{
	auto A = std::make_shared<GradedAlgebra>();
	A->top = 0;
	A->names = {"1"};
	A->codim = {0};
	A->unit = 0;
	A->table = {{SparseVec::unit(0)}};
	A->degree_functional = SparseVec::unit(0);
	A->finalize();
	auto V = std::make_shared<Variety>();
	V->name = "pt";
	V->dim = 0;
	V->chow = A;
	V->tangent_chern = SparseVec::unit(0);
	V->point_class = SparseVec::unit(0);
	return V;
}

VarP build_projective_space(int n)
{
	if (n < 0)
		throw std::invalid_argument("projective_space: negative dimension");
	auto A = std::make_shared<GradedAlgebra>();
	A->top = n;
	for (int i = 0; i <= n; ++i) {
		A->names.push_back(i == 0 ? "1" : (i == 1 ? "h" : fmt::format("h^{}", i)));
		A->codim.push_back(i);
	}
	A->unit = 0;
	A->table.assign(n + 1, std::vector<SparseVec>(n + 1));
	for (int i = 0; i <= n; ++i)
		for (int j = 0; j <= n; ++j)
			if (i + j <= n)
				A->table[i][j] = SparseVec::unit(i + j);
	A->degree_functional = SparseVec::unit(n);
	A->finalize();

	auto V = std::make_shared<Variety>();
	V->name = fmt::format("P{}", n);
	V->dim = n;
	V->chow = A;
	V->point_class = SparseVec::unit(n);
	// c(T) = (1+h)^{n+1} truncated
	SparseVec t;
	for (int k = 0; k <= n; ++k)
		t.add_term(k, binom(Rat(n + 1), k));
	V->tangent_chern = t;
	if (n >= 1)
		V->gens.emplace_back("h", SparseVec::unit(1));
	return V;
}

Cls ProductData::external(const Cls& a, const Cls& b) const
{
	if (a.A != X->alg() || b.A != Y->alg())
		throw std::invalid_argument("external: classes on wrong factors");
	SparseVec r;
	for (auto& [i, ci] : a.v.t)
		for (auto& [j, cj] : b.v.t)
			r.add_term(pair_index(i, j), ci * cj);
	return {V->alg(), r};
}

ProductData build_product(VarP X, VarP Y, const std::string& name)
{
	const auto* AX = X->alg();
	const auto* AY = Y->alg();
	int nX = AX->dim(), nY = AY->dim();
	auto A = std::make_shared<GradedAlgebra>();
	A->top = AX->top + AY->top;
	A->names.resize(size_t(nX) * nY);
	A->codim.resize(size_t(nX) * nY);
	for (int i = 0; i < nX; ++i)
		for (int j = 0; j < nY; ++j) {
			int k = i * nY + j;
			if (i == AX->unit)
				A->names[k] = AY->names[j];
			else if (j == AY->unit)
				A->names[k] = AX->names[i];
			else
				A->names[k] = fmt::format("{}*{}", AX->names[i], AY->names[j]);
			A->codim[k] = AX->codim[i] + AY->codim[j];
		}
	A->unit = AX->unit * nY + AY->unit;
	A->table.assign(A->names.size(), std::vector<SparseVec>(A->names.size()));
	for (int i = 0; i < nX; ++i)
		for (int ip = 0; ip < nX; ++ip) {
			const SparseVec& px = AX->mul_basis(i, ip);
			if (px.empty())
				continue;
			for (int j = 0; j < nY; ++j)
				for (int jp = 0; jp < nY; ++jp) {
					const SparseVec& py = AY->mul_basis(j, jp);
					if (py.empty())
						continue;
					SparseVec r;
					for (auto& [u, cu] : px.t)
						for (auto& [v, cv] : py.t)
							r.add_term(u * nY + v, cu * cv);
					A->table[i * nY + j][ip * nY + jp] = std::move(r);
				}
		}
	for (auto& [i, ci] : AX->degree_functional.t)
		for (auto& [j, cj] : AY->degree_functional.t)
			A->degree_functional.add_term(i * nY + j, ci * cj);
	A->finalize();

	auto V = std::make_shared<Variety>();
	V->name = name;
	V->dim = X->dim + Y->dim;
	V->chow = A;

	ProductData pd;
	pd.V = V;
	pd.X = X;
	pd.Y = Y;

	Mat P1(A->dim(), nX), P2(A->dim(), nY);
	for (int i = 0; i < nX; ++i)
		P1.at(i * nY + AY->unit, i) = 1;
	for (int j = 0; j < nY; ++j)
		P2.at(AX->unit * nY + j, j) = 1;
	pd.p1 = {V, X, P1};
	pd.p2 = {V, Y, P2};

	auto vv = V;
	vv->tangent_chern =
	    (pd.external({AX, X->tangent_chern}, Cls::one(AY)) *
	     pd.external(Cls::one(AX), {AY, Y->tangent_chern}))
	        .v;
	vv->point_class = pd.external(X->pt(), Y->pt()).v;
	for (auto& [g, v] : X->gens)
		vv->gens.emplace_back(g + "1", pd.external({AX, v}, Cls::one(AY)).v);
	for (auto& [g, v] : Y->gens)
		vv->gens.emplace_back(g + "2", pd.external(Cls::one(AX), {AY, v}).v);
	return pd;
}

Cls segre(const BundleData& E, int k)
{
	Cls s = series_invert(E.chern_cls());
	return s.part(k);
}

PBundleData build_projective_bundle(const BundleData& E, const std::string& name)
{
	const auto* AX = E.carrier->alg();
	if (E.rank < 1)
		throw std::invalid_argument("projective_bundle: rank must be >= 1");
	Cls c = E.chern_cls();
	if (!(c.part(0) == Cls::one(AX)))
		throw std::invalid_argument("projective_bundle: c_0(E) != 1");
	int r = E.rank - 1;
	int nX = AX->dim();
	int n = (r + 1) * nX;

	auto A = std::make_shared<GradedAlgebra>();
	A->top = AX->top + r;
	A->names.resize(n);
	A->codim.resize(n);
	for (int l = 0; l <= r; ++l)
		for (int i = 0; i < nX; ++i) {
			int k = l * nX + i;
			std::string base = AX->names[i];
			if (l == 0)
				A->names[k] = base;
			else {
				std::string xi = l == 1 ? "xi" : fmt::format("xi^{}", l);
				A->names[k] = (i == AX->unit) ? xi : fmt::format("{}.{}", xi, base);
			}
			A->codim[k] = l + AX->codim[i];
		}
	A->unit = AX->unit;

	// xi-power reduction mod xi^{r+1} + c_1 xi^r + ... + c_{r+1}
	auto reduce = [&](std::vector<Cls> coeff) {
		for (int k = int(coeff.size()) - 1; k > r; --k) {
			if (coeff[k].is_zero())
				continue;
			for (int s = 1; s <= r + 1; ++s)
				coeff[k - s] -= c.part(s) * coeff[k];
			coeff[k] = Cls::zero(AX);
		}
		coeff.resize(r + 1, Cls::zero(AX));
		return coeff;
	};
	auto assemble = [&](const std::vector<Cls>& coeff) {
		SparseVec out;
		for (int l = 0; l <= r; ++l)
			for (auto& [i, ci] : coeff[l].v.t)
				out.add_term(l * nX + i, ci);
		return out;
	};

	A->table.assign(n, std::vector<SparseVec>(n));
	for (int l = 0; l <= r; ++l)
		for (int m = 0; m <= r; ++m)
			for (int i = 0; i < nX; ++i)
				for (int j = 0; j < nX; ++j) {
					const SparseVec& base = AX->mul_basis(i, j);
					if (base.empty())
						continue;
					std::vector<Cls> coeff(l + m + 1, Cls::zero(AX));
					coeff[l + m] = {AX, base};
					A->table[l * nX + i][m * nX + j] = assemble(reduce(std::move(coeff)));
				}
	for (auto& [i, ci] : AX->degree_functional.t)
		A->degree_functional.add_term(r * nX + i, ci);
	A->finalize();

	auto V = std::make_shared<Variety>();
	V->name = name;
	V->dim = E.carrier->dim + r;
	V->chow = A;

	PBundleData pb;
	pb.P = V;
	pb.E = E;
	pb.r = r;
	pb.xi = r >= 1 ? SparseVec::unit(1 * nX + AX->unit) : [&] {
		// P(L) = carrier with xi = -c_1(L)
		return (-c.part(1)).v;
	}();
	Mat Pi(n, nX);
	for (int i = 0; i < nX; ++i)
		Pi.at(i, i) = 1;
	pb.pi = {V, E.carrier, Pi};

	Cls xiC = {A.get(), pb.xi};
	Cls cE_up = pb.pi.pull(c); // needs pi defined; pull uses matrices only
	Cls cT_up = pb.pi.pull(E.carrier->tangent());
	V->tangent_chern = (cT_up * chern_twist_line(cE_up, E.rank, xiC)).v;
	V->point_class = (xiC.pow(r) * pb.pi.pull(E.carrier->pt())).v;
	for (auto& [g, v] : E.carrier->gens)
		V->gens.emplace_back(g, pb.pi.pull({AX, v}).v);
	V->gens.emplace_back("xi", pb.xi);
	return pb;
}

int BlowUpData::exc_index(int c, int l, int y) const
{
	const ExcComponent& e = exc[c];
	if (e.r == 0 || l < 1 || l > e.r)
		throw std::invalid_argument("exc_index: out of range");
	return e.offset + (l - 1) * centers[c].Y->rank() + y;
}

Cls BlowUpData::exceptional_divisor_class(int c) const
{
	return jstar_cls(c, Cls::one(exc[c].E->alg()));
}

Cls BlowUpData::jstar_cls(int c, const Cls& on_Ec) const
{
	if (on_Ec.A != exc[c].E->alg())
		throw std::invalid_argument("jstar_cls: class not on E_c");
	return {Xt->alg(), mat_apply(exc[c].jstar, on_Ec.v)};
}

BlowUpData build_blow_up(VarP X, std::vector<CenterComponent> centers, const std::string& name)
{
	const auto* AX = X->alg();
	int nX = AX->dim();
	if (centers.empty())
		throw std::invalid_argument("blow_up: no centers");
	bool deg = true, nondeg = true;
	for (auto& ctr : centers) {
		if (ctr.N.carrier != ctr.Y || ctr.incl.source != ctr.Y || ctr.incl.target != X)
			throw std::invalid_argument("blow_up: inconsistent center data");
		if (ctr.Y->dim + ctr.N.rank != X->dim)
			throw std::invalid_argument(
			    fmt::format("blow_up: center '{}' rank/codimension mismatch", ctr.Y->name));
		if (!(ctr.N.chern_cls().part(0) == Cls::one(ctr.Y->alg())))
			throw std::invalid_argument("blow_up: c_0(N) != 1");
		(ctr.N.rank == 1 ? nondeg : deg) = false;
	}
	if (!deg && !nondeg)
		throw std::invalid_argument("blow_up: mixed codim-1 and higher centers unsupported");

	BlowUpData bu;
	bu.X = X;
	bu.centers = centers;
	bu.degenerate = deg;

	if (deg) {
		bu.Xt = X;
		bu.rho = identity_morphism(X);
		for (auto& ctr : centers) {
			ExcComponent e;
			e.E = ctr.Y;
			e.pi = identity_morphism(ctr.Y);
			e.j = ctr.incl;
			e.xi = (-ctr.N.chern_cls().part(1)).v;
			e.jstar = ctr.incl.pushforward_matrix();
			e.r = 0;
			e.offset = -1;
			bu.exc.push_back(std::move(e));
		}
		return bu;
	}

	// exceptional divisors as projective bundles
	struct Local {
		PBundleData pb;
		Mat istar; // pushforward of the center inclusion
		int nY = 0;
	};
	std::vector<Local> loc;
	int n = nX;
	for (size_t c = 0; c < centers.size(); ++c) {
		Local L;
		L.pb = build_projective_bundle(centers[c].N,
		                               fmt::format("E({}<{})", centers[c].Y->name, name));
		L.istar = centers[c].incl.pushforward_matrix();
		L.nY = centers[c].Y->rank();
		loc.push_back(std::move(L));
		bu.exc.push_back({});
		bu.exc[c].r = centers[c].N.rank - 1;
		bu.exc[c].offset = n;
		n += bu.exc[c].r * loc[c].nY;
	}

	auto A = std::make_shared<GradedAlgebra>();
	A->top = AX->top;
	A->names.resize(n);
	A->codim.resize(n);
	A->unit = AX->unit;
	for (int i = 0; i < nX; ++i) {
		A->names[i] = AX->names[i];
		A->codim[i] = AX->codim[i];
	}
	for (size_t c = 0; c < centers.size(); ++c) {
		const auto* AY = centers[c].Y->alg();
		for (int l = 1; l <= bu.exc[c].r; ++l)
			for (int y = 0; y < loc[c].nY; ++y) {
				int k = bu.exc[c].offset + (l - 1) * loc[c].nY + y;
				std::string tag = centers.size() > 1 ? std::to_string(c + 1) : std::string();
				A->names[k] = fmt::format("e{}^{}[{}]", tag, l, AY->names[y]);
				A->codim[k] = l + AY->codim[y];
			}
	}

	// j_* on the canonical form of CH(E_c), folding xi^r through the key
	// formula rho^* i_* beta = j_*(c_r(pi^* N / O(-1)) pi^* beta).
	auto jstar_canonical = [&](size_t c, const SparseVec& onE) {
		const auto* AY = centers[c].Y->alg();
		int r = bu.exc[c].r;
		SparseVec out;
		SparseVec top; // coefficient of xi^r, a class on Y
		for (auto& [k, coef] : onE.t) {
			int l = k / loc[c].nY, y = k % loc[c].nY;
			if (l < r)
				out.add_term(bu.exc[c].offset + l * loc[c].nY + y, coef);
			else
				top.add_term(y, coef);
		}
		if (!top.empty()) {
			SparseVec pushed = mat_apply(loc[c].istar, top);
			for (auto& [i, coef] : pushed.t)
				out.add_term(i, coef);
			Cls cN = centers[c].N.chern_cls();
			for (int s = 1; s <= r; ++s) {
				SparseVec w = AY->mul(cN.part(s).v, top);
				for (auto& [y, coef] : w.t)
					out.add_term(bu.exc[c].offset + (r - s) * loc[c].nY + y, -coef);
			}
		}
		return out;
	};

	A->table.assign(n, std::vector<SparseVec>(n));
	for (int i = 0; i < nX; ++i)
		for (int j = i; j < nX; ++j) {
			A->table[i][j] = AX->mul_basis(i, j);
			A->table[j][i] = A->table[i][j];
		}
	for (size_t c = 0; c < centers.size(); ++c) {
		const auto* AY = centers[c].Y->alg();
		const auto* AE = loc[c].pb.P->alg();
		int r = bu.exc[c].r;
		for (int l = 1; l <= r; ++l)
			for (int y = 0; y < loc[c].nY; ++y) {
				int k = bu.exc[c].offset + (l - 1) * loc[c].nY + y;
				// X part times exceptional
				for (int i = 0; i < nX; ++i) {
					SparseVec w = AY->mul(centers[c].incl.pullback.col_sparse(i),
					                      SparseVec::unit(y));
					SparseVec res;
					for (auto& [t, coef] : w.t)
						res.add_term(bu.exc[c].offset + (l - 1) * loc[c].nY + t, coef);
					A->table[i][k] = res;
					A->table[k][i] = std::move(res);
				}
				// exceptional times exceptional, same component
				for (int m = 1; m <= r; ++m)
					for (int z = 0; z < loc[c].nY; ++z) {
						int k2 = bu.exc[c].offset + (m - 1) * loc[c].nY + z;
						if (k2 < k)
							continue;
						SparseVec w =
						    AE->mul(SparseVec::unit((l - 1) * loc[c].nY + y),
						            SparseVec::unit((m - 1) * loc[c].nY + z));
						SparseVec v = AE->mul(loc[c].pb.xi, w);
						v *= Rat(-1);
						SparseVec res = jstar_canonical(c, v);
						A->table[k][k2] = res;
						A->table[k2][k] = std::move(res);
					}
			}
	}
	A->degree_functional = AX->degree_functional;
	A->finalize();

	auto V = std::make_shared<Variety>();
	V->name = name;
	V->dim = X->dim;
	V->chow = A;
	V->point_class = X->point_class;

	bu.Xt = V;
	Mat R(n, nX);
	for (int i = 0; i < nX; ++i)
		R.at(i, i) = 1;
	bu.rho = {V, X, R};

	for (size_t c = 0; c < centers.size(); ++c) {
		ExcComponent& e = bu.exc[c];
		e.pb = loc[c].pb;
		e.E = loc[c].pb.P;
		e.pi = loc[c].pb.pi;
		e.xi = loc[c].pb.xi;
		const auto* AE = e.E->alg();
		int nE = AE->dim();
		e.jstar = Mat(n, nE);
		for (int k = 0; k < nE; ++k) {
			SparseVec col = jstar_canonical(c, SparseVec::unit(k));
			for (auto& [i, coef] : col.t)
				e.jstar.at(i, k) += coef;
		}
		// j^*: on the X part pi^* i^*, on the same component -xi * (-),
		// zero across components
		Mat J(nE, n);
		for (int i = 0; i < nX; ++i)
			for (auto& [t, coef] : centers[c].incl.pullback.col_sparse(i).t)
				J.at(t, i) = coef; // pi^* = slot l=0
		for (int l = 1; l <= e.r; ++l)
			for (int y = 0; y < loc[c].nY; ++y) {
				int k = e.offset + (l - 1) * loc[c].nY + y;
				SparseVec v = AE->mul(e.xi, SparseVec::unit((l - 1) * loc[c].nY + y));
				v *= Rat(-1);
				for (auto& [t, coef] : v.t)
					J.at(t, k) = coef;
			}
		e.j = {e.E, V, J};
		if (!(e.j.pushforward_matrix() == e.jstar))
			throw std::logic_error("blow_up: adjoint pushforward disagrees with key formula");
	}

	// c(T_X~) via ch(T_X~) = rho^* ch(T_X) - sum_c j_* ( ch(pi^* N / O(-1)) / td(O(E)|_E) )
	Cls chT = bu.rho.pull(chern_character(Rat(X->dim), X->tangent()));
	for (size_t c = 0; c < centers.size(); ++c) {
		const ExcComponent& e = bu.exc[c];
		Cls xiE = {e.E->alg(), e.xi};
		Cls chF = e.pi.pull(chern_character(Rat(centers[c].N.rank),
		                                    centers[c].N.chern_cls())) -
		          exp_class(-xiE);
		Cls arg = chF * todd_inverse_of_line(-xiE);
		chT -= bu.jstar_cls(int(c), arg);
	}
	V->tangent_chern = chern_from_character(chT).v;
	if (!(Cls(A.get(), V->tangent_chern).part(0) == V->one()))
		throw std::logic_error("blow_up: tangent Chern class has bad rank term");

	for (auto& [g, v] : X->gens)
		V->gens.emplace_back(g, mat_apply(R, v));
	for (size_t c = 0; c < centers.size(); ++c)
		V->gens.emplace_back(centers.size() > 1 ? fmt::format("e{}", c + 1) : "e",
		                     bu.exceptional_divisor_class(int(c)).v);

	// sanity: rho_* rho^* = id
	Mat rp = mat_mul(bu.rho.pushforward_matrix(), bu.rho.pullback);
	if (!(rp == Mat::identity(nX)))
		throw std::logic_error("blow_up: rho_* rho^* != id");
	return bu;
}

Morphism strict_transform_inclusion(const BlowUpData& ambient, const StrictTransformSpec& s)
{
	if (s.iZ.source != s.Z || s.iZ.target != ambient.X)
		throw std::invalid_argument("strict_transform_inclusion: iZ mismatch");
	if (!s.Zt) {
		// Z misses the center: Z~ = Z and the exceptional summands restrict to 0
		Mat P(s.Z->rank(), ambient.Xt->rank());
		for (int a = 0; a < ambient.X->rank(); ++a)
			for (int i = 0; i < s.Z->rank(); ++i)
				P.at(i, a) = s.iZ.pullback.at(i, a);
		return {s.Z, ambient.Xt, P};
	}
	const BlowUpData& zt = *s.Zt;
	for (size_t c = 0; c < s.comp_map.size(); ++c)
		if (s.f[c].source != zt.centers[c].Y ||
		    s.f[c].target != ambient.centers[s.comp_map[c]].Y)
			throw std::invalid_argument(
			    "strict_transform_inclusion: intersection map has wrong ends");
	int nAmb = ambient.Xt->rank();
	int nZt = zt.Xt->rank();
	Mat P(nZt, nAmb);

	// ambient X part: rho_Z^* i_Z^*
	Mat xpart = mat_mul(zt.rho.pullback, s.iZ.pullback);
	int nX = ambient.X->rank();
	for (int a = 0; a < nX; ++a)
		for (int i = 0; i < nZt; ++i)
			P.at(i, a) = xpart.at(i, a);

	for (size_t ca = 0; ca < ambient.exc.size(); ++ca) {
		if (ambient.exc[ca].r == 0)
			throw std::invalid_argument("strict_transform_inclusion: degenerate ambient");
		int czt = -1;
		for (size_t c = 0; c < s.comp_map.size(); ++c)
			if (s.comp_map[c] == int(ca))
				czt = int(c);
		if (czt < 0)
			continue; // Z misses this center: restriction of the summand is 0
		const auto& ez = zt.exc[czt];
		const auto* AEz = ez.E->alg();
		Cls xiz = {AEz, ez.xi};
		int nY = ambient.centers[ca].Y->rank();
		for (int l = 1; l <= ambient.exc[ca].r; ++l)
			for (int y = 0; y < nY; ++y) {
				int col = ambient.exc_index(int(ca), l, y);
				Cls fy = {AEz, mat_apply(ez.pi.pullback,
				                         mat_apply(s.f[czt].pullback, SparseVec::unit(y)))};
				Cls onE = xiz.pow(l - 1) * fy;
				Cls res = zt.jstar_cls(czt, onE);
				for (auto& [i, coef] : res.v.t)
					P.at(i, col) = coef;
			}
	}
	return {zt.Xt, ambient.Xt, P};
}

BundleData normal_excess_bundle(const BundleData& N_Yp_X, const BundleData& N_Yp_Y,
                                const BundleData& N_Yp_Z)
{
	if (N_Yp_X.carrier != N_Yp_Y.carrier || N_Yp_X.carrier != N_Yp_Z.carrier)
		throw std::invalid_argument("normal_excess_bundle: carriers differ");
	int rank = N_Yp_X.rank - N_Yp_Y.rank - N_Yp_Z.rank;
	if (rank < 0)
		throw std::invalid_argument("normal_excess_bundle: negative rank");
	Cls ch = chern_character(Rat(N_Yp_X.rank), N_Yp_X.chern_cls()) -
	         chern_character(Rat(N_Yp_Y.rank), N_Yp_Y.chern_cls()) -
	         chern_character(Rat(N_Yp_Z.rank), N_Yp_Z.chern_cls());
	return {N_Yp_X.carrier, rank, chern_from_character(ch).v};
}

BundleData normal_bundle_of_strict_transform(const BlowUpData& Zt, const BundleData& N_Z_X,
                                             const std::vector<BundleData>& N_YZX_per_comp)
{
	if (N_Z_X.carrier != Zt.X)
		throw std::invalid_argument("normal_bundle_of_strict_transform: N_{Z/X} not on Z");
	if (N_YZX_per_comp.size() != Zt.exc.size())
		throw std::invalid_argument("normal_bundle_of_strict_transform: component mismatch");
	Cls ch = Zt.rho.pull(chern_character(Rat(N_Z_X.rank), N_Z_X.chern_cls()));
	for (size_t c = 0; c < Zt.exc.size(); ++c) {
		const auto& e = Zt.exc[c];
		if (N_YZX_per_comp[c].carrier != Zt.centers[c].Y)
			throw std::invalid_argument("normal_bundle_of_strict_transform: N_{Y,Z/X} carrier");
		Cls xiE = {e.E->alg(), e.xi};
		Cls arg = e.pi.pull(chern_character(Rat(N_YZX_per_comp[c].rank),
		                                    N_YZX_per_comp[c].chern_cls())) *
		          todd_inverse_of_line(-xiE);
		ch -= Zt.jstar_cls(int(c), arg);
	}
	return {Zt.Xt, N_Z_X.rank, chern_from_character(ch).v};
}

Cls excess_pullback_of_pushforward(const BlowUpData& ambient, const StrictTransformSpec& s,
                                   const Morphism& jZt, const Cls& alpha)
{
	if (!s.Zt)
		return jZt.push(alpha); // disjoint from the center: no correction
	const BlowUpData& zt = *s.Zt;
	int p = -1;
	for (auto& [i, c] : alpha.v.t) {
		int ci = s.Z->alg()->codim[i];
		if (p >= 0 && ci != p)
			throw std::invalid_argument("excess_pullback: alpha must be homogeneous");
		p = ci;
	}
	if (p < 0)
		return Cls::zero(ambient.Xt->alg());
	int shift = ambient.X->dim - s.Z->dim;
	Cls out = jZt.push(zt.rho.pull(alpha));
	for (size_t c = 0; c < s.comp_map.size(); ++c) {
		int ca = s.comp_map[c];
		const auto& ea = ambient.exc[ca];
		const auto* AEa = ea.E->alg();
		Cls xiA = {AEa, ea.xi};
		// c(E) = c(pi^* N_{Y/X}) / c(O(-1))
		Cls cE = ea.pi.pull(ambient.centers[ca].N.chern_cls()) *
		         series_invert(Cls::one(AEa) - xiA);
		// s(Y',Z) * i'^* alpha pushed to Y, pulled up to E
		Cls sY = series_invert(s.Zt->centers[c].N.chern_cls());
		Cls inner = sY * s.Zt->centers[c].incl.pull(alpha);
		Cls pushed = s.f[c].push(inner);
		Cls arg = cE * ea.pi.pull(pushed);
		out += ambient.jstar_cls(ca, arg.part(p + shift - 1));
	}
	return out;
}

IdempotentImageData build_idempotent_image(VarP X, const Mat& q_action, const Rat& N,
                                           const SparseVec& pullback_tangent_chern,
                                           const std::string& name)
{
	const auto* AX = X->alg();
	int nX = AX->dim();
	if (q_action.nr != nX || q_action.nc != nX)
		throw std::invalid_argument("idempotent_image: wrong matrix size");
	if (!(mat_mul(q_action, q_action) == q_action))
		throw std::invalid_argument("idempotent_image: matrix is not idempotent");
	if (!(mat_mul(AX->gram, q_action) == mat_mul(q_action.transposed(), AX->gram)))
		throw std::invalid_argument("idempotent_image: not self-adjoint for the pairing");
	for (int j = 0; j < nX; ++j)
		for (int i = 0; i < nX; ++i)
			if (!is_zero(q_action.at(i, j)) && AX->codim[i] != AX->codim[j])
				throw std::invalid_argument("idempotent_image: not codim-preserving");

	// basis of the image, reduced echelon per codimension
	std::vector<SparseVec> reps;
	std::vector<int> repcodim;
	for (int pcod = 0; pcod <= AX->top; ++pcod) {
		auto& slot = AX->slots[pcod];
		Mat M(int(slot.size()), nX);
		for (size_t a = 0; a < slot.size(); ++a)
			M.set_row(int(a), mat_apply(q_action, SparseVec::unit(slot[a])));
		for (auto& v : row_space_basis(M)) {
			reps.push_back(v);
			repcodim.push_back(pcod);
		}
	}
	int nY = int(reps.size());
	Mat basis_cols(nX, nY);
	for (int k = 0; k < nY; ++k)
		for (auto& [i, c] : reps[k].t)
			basis_cols.at(i, k) = c;

	// coordinates: solve basis_cols * x = v exactly, verifying membership
	auto coords = [&](const SparseVec& v) {
		SparseVec x;
		if (!solve(basis_cols, v, x))
			throw std::domain_error(
			    fmt::format("idempotent_image '{}': class not in the image", name));
		SparseVec back;
		for (auto& [k, c] : x.t) {
			SparseVec t = reps[k];
			t *= c;
			back += t;
		}
		if (!(back == v))
			throw std::domain_error(
			    fmt::format("idempotent_image '{}': class not in the image", name));
		return x;
	};

	auto A = std::make_shared<GradedAlgebra>();
	A->top = AX->top;
	for (int k = 0; k < nY; ++k) {
		A->names.push_back(fmt::format("y{}_{}", repcodim[k], k));
		A->codim.push_back(repcodim[k]);
	}
	// unit: q fixes 1
	SparseVec unitX = SparseVec::unit(AX->unit);
	if (!(mat_apply(q_action, unitX) == unitX))
		throw std::invalid_argument("idempotent_image: q(1) != 1");
	{
		SparseVec u = coords(unitX);
		if (u.size() != 1 || !(u.t[0].second == 1))
			throw std::logic_error("idempotent_image: unit is not a basis element");
		A->unit = u.t[0].first;
		A->names[A->unit] = "1";
	}
	A->table.assign(nY, std::vector<SparseVec>(nY));
	for (int a = 0; a < nY; ++a)
		for (int b = a; b < nY; ++b) {
			if (repcodim[a] + repcodim[b] > A->top)
				continue;
			SparseVec prod = AX->mul(reps[a], reps[b]);
			A->table[a][b] = coords(prod);
			A->table[b][a] = A->table[a][b];
		}
	for (int k = 0; k < nY; ++k)
		if (repcodim[k] == A->top) {
			Rat d = AX->degree(reps[k]) / N;
			if (!is_zero(d))
				A->degree_functional.add_term(k, d);
		}
	A->finalize();

	auto V = std::make_shared<Variety>();
	V->name = name;
	V->dim = X->dim;
	V->chow = A;
	V->tangent_chern = coords(pullback_tangent_chern);
	{
		SparseVec ptY = mat_apply(q_action, X->point_class);
		ptY *= N;
		V->point_class = coords(ptY);
		if (!(V->pt().deg() == 1))
			throw std::logic_error("idempotent_image: point class degree != 1");
	}

	IdempotentImageData dd;
	dd.Y = V;
	dd.q_action = q_action;
	dd.N = N;
	dd.p = {X, V, basis_cols};
	return dd;
}

Report GroupActionData::verify() const
{
	Report rep;
	const auto* AX = X->alg();
	bool ok = !pullback.empty() && pullback[0] == Mat::identity(AX->dim());
	rep.add("action.identity_first", ok);
	ok = true;
	std::string w;
	for (size_t g = 0; g < pullback.size() && ok; ++g) {
		Morphism m{X, X, pullback[g]};
		Report r = verify_morphism(m, false);
		if (!r.all_pass()) {
			ok = false;
			w = fmt::format("element '{}' is not a ring map", names[g]);
		}
		SparseVec d;
		for (int i = 0; i < AX->dim(); ++i) {
			Rat v = AX->degree(mat_apply(pullback[g], SparseVec::unit(i)));
			if (!is_zero(v))
				d.add_term(i, v);
		}
		if (ok && !(d == AX->degree_functional)) {
			ok = false;
			w = fmt::format("element '{}' does not preserve degree", names[g]);
		}
	}
	rep.add("action.automorphisms", ok, w);
	ok = true;
	w.clear();
	for (size_t g = 0; g < pullback.size() && ok; ++g)
		for (size_t h = 0; h < pullback.size(); ++h) {
			Mat gh = mat_mul(pullback[g], pullback[h]);
			bool found = false;
			for (auto& m : pullback)
				if (m == gh)
					found = true;
			if (!found) {
				ok = false;
				w = fmt::format("composition {}{} leaves the set", names[g], names[h]);
				break;
			}
		}
	rep.add("action.closed", ok, w);
	return rep;
}

SparseVec quotient_pullback_tangent(VarP X, const Morphism& jR, const Cls& normal_c1_on_R)
{
	if (jR.target != X)
		throw std::invalid_argument("quotient_pullback_tangent: divisor not in X");
	Cls n = normal_c1_on_R;
	Cls chOmega = dual_character(chern_character(Rat(X->dim), X->tangent()));
	Cls conormal_ch = exp_class(-n) * todd_inverse_of_line(n);
	Cls chPullOmega = chOmega - jR.push(conormal_ch);
	return chern_from_character(dual_character(chPullOmega)).v;
}

IdempotentImageData build_quotient(VarP X, const GroupActionData& G,
                                   const SparseVec& pullback_tangent_chern,
                                   const std::string& name)
{
	Report vr = G.verify();
	if (!vr.all_pass())
		throw std::invalid_argument(
		    fmt::format("quotient: bad group action ({})", vr.first_failure()->id));
	Mat e(X->rank(), X->rank());
	for (auto& m : G.pullback)
		e += m;
	e *= Rat(1) / Rat(long(G.pullback.size()));
	return build_idempotent_image(X, e, Rat(long(G.pullback.size())), pullback_tangent_chern,
	                              name);
}

} // namespace mck
