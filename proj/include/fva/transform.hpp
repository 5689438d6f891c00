#pragma once

#include "fva/diffops.hpp"
#include <deque>

namespace fva {

namespace detail {

/// a structural move between four-point regions, as an op list on series
struct Move
{
	std::string to; // target tree text
	enum Kind
	{
		skew,     // 1(2(34)) <-> 1(2(43))
		ass1_f,   // 1((23)4) -> 1(4(23))
		ass1_b,
		ass2a_f,  // (1(23))4 -> 4(1(23))
		ass2a_b,
		ass2b_f,  // ((12)3)4 -> 4(3(12))
		ass2b_b,
	} kind;
};

inline std::string leaf_text(const Parenthesization &p, int v)
{
	return std::to_string(p.nodes[v].leaf);
}

/// available single moves out of a P4 tree
inline std::vector<Move> paren_moves(const Parenthesization &p)
{
	std::vector<Move> out;
	std::string shape = paren_shape(p);
	auto L = [&](int v) { return p.nodes[v].l; };
	auto R = [&](int v) { return p.nodes[v].r; };
	int rt = p.root;
	if (shape == "1((23)4)") {
		// a((bc)d) -> a(d(bc))
		int a = L(rt), inner = R(rt), bc = L(inner), d = R(inner);
		out.push_back({leaf_text(p, a) + "(" + leaf_text(p, d) + "(" +
		                   leaf_text(p, L(bc)) + leaf_text(p, R(bc)) + "))",
		               Move::ass1_f});
	} else if (shape == "(1(23))4") {
		// (a(bc))d -> d(a(bc))
		int left = L(rt), d = R(rt), a = L(left), bc = R(left);
		out.push_back({leaf_text(p, d) + "(" + leaf_text(p, a) + "(" +
		                   leaf_text(p, L(bc)) + leaf_text(p, R(bc)) + "))",
		               Move::ass2a_f});
	} else if (shape == "((12)3)4") {
		// ((ab)c)d -> d(c(ab))
		int left = L(rt), d = R(rt), ab = L(left), c = R(left);
		out.push_back({leaf_text(p, d) + "(" + leaf_text(p, c) + "(" +
		                   leaf_text(p, L(ab)) + leaf_text(p, R(ab)) + "))",
		               Move::ass2b_f});
	} else if (shape == "1(2(34))") {
		int a = L(rt), inner = R(rt), b = L(inner), cd = R(inner);
		std::string A = leaf_text(p, a), B = leaf_text(p, b);
		std::string C = leaf_text(p, L(cd)), D = leaf_text(p, R(cd));
		out.push_back({A + "(" + B + "(" + D + C + "))", Move::skew});
		// reading a(b(cd)) as the image of each forward move:
		out.push_back({A + "((" + C + D + ")" + B + ")", Move::ass1_b});
		out.push_back({"(" + B + "(" + C + D + "))" + A, Move::ass2a_b});
		out.push_back({"((" + C + D + ")" + B + ")" + A, Move::ass2b_b});
	}
	return out;
}

template <class C>
SeriesT<C> apply_move(const SeriesT<C> &g, const Parenthesization &from,
                      const Parenthesization &to, Move::Kind kind)
{
	SeriesT<C> r = g;
	switch (kind) {
	case Move::skew:
		r = exp_derivation(r, Rational(1), 2, {0, 1});
		r = negate_var(r, 2);
		break;
	case Move::ass1_f:
		r = negate_var(r, 1);
		r = exp_derivation(r, Rational(-1), 1, {0});
		break;
	case Move::ass1_b:
		r = exp_derivation(r, Rational(1), 1, {0});
		r = negate_var(r, 1);
		break;
	case Move::ass2a_f:
	case Move::ass2a_b:
		r = negate_var(r, 0);
		break;
	case Move::ass2b_f:
		r = exp_derivation(r, Rational(-1), 1, {0});
		r = negate_var(r, 0);
		r = negate_var(r, 1);
		break;
	case Move::ass2b_b:
		r = negate_var(r, 1);
		r = negate_var(r, 0);
		r = exp_derivation(r, Rational(1), 1, {0});
		break;
	}
	(void)from;
	r.vars = to.var_names;
	return r;
}

} // namespace detail

/// the inter-region transform T_from^to on the supported table (compositions
/// of the four base families and their inverses); throws for unsupported
/// pairs, notably any route into or out of the (12)(34) class
template <class C>
SeriesT<C> transform(const SeriesT<C> &g, const Parenthesization &from,
                     const Parenthesization &to)
{
	if (from.text == to.text)
		return g;
	if (from.has_star || to.has_star || from.nleaves != 4 || to.nleaves != 4)
		throw std::invalid_argument("transform: P4 elements expected");
	// breadth-first route through the move graph
	std::map<std::string, std::pair<std::string, detail::Move::Kind>> back;
	std::deque<std::string> queue{from.text};
	back[from.text] = {"", detail::Move::skew};
	while (!queue.empty() && !back.count(to.text)) {
		std::string cur = queue.front();
		queue.pop_front();
		Parenthesization p = parse_paren(cur);
		for (const auto &mv : detail::paren_moves(p))
			if (!back.count(mv.to)) {
				back[mv.to] = {cur, mv.kind};
				queue.push_back(mv.to);
			}
	}
	if (!back.count(to.text))
		throw std::domain_error("transform: unsupported pair " + from.text +
		                        " -> " + to.text +
		                        " (no route; channel-class expansions cannot be "
		                        "transformed)");
	std::vector<std::pair<std::string, detail::Move::Kind>> route;
	for (std::string cur = to.text; cur != from.text;) {
		auto [prev, kind] = back.at(cur);
		route.push_back({cur, kind});
		cur = prev;
	}
	SeriesT<C> r = g;
	Parenthesization cur = from;
	for (auto it = route.rbegin(); it != route.rend(); ++it) {
		Parenthesization nxt = parse_paren(it->first);
		r = detail::apply_move(r, cur, nxt, it->second);
		cur = std::move(nxt);
	}
	return r;
}

/// lift a P4-region series to the Q4 star region of A:
/// the vacuum-insertion change of variables exp(-z_k * sum d/dz_{ik})
template <class C>
SeriesT<C> star_lift(const SeriesT<C> &g, const Parenthesization &A,
                     const Rational &requested_cap)
{
	if (!A.has_star)
		throw std::invalid_argument("star_lift: Q element expected");
	int ps = star_parent(A);
	if (ps == A.root)
		throw std::invalid_argument(
		    "star_lift: (A)* forms coincide with e_A and are not lifted");
	Parenthesization B = paren_unstar(A);
	size_t na = A.var_nodes.size();

	// positional map: A's DFS var list minus the star-parent node == B's list
	size_t ps_pos = A.var_pos(ps);
	std::vector<size_t> where(B.var_nodes.size());
	{
		size_t bi = 0;
		for (size_t ai = 0; ai < na; ++ai)
			if (ai != ps_pos)
				where[bi++] = ai;
	}
	if (g.vars != B.var_names)
		throw std::invalid_argument("star_lift: series not in the region of " +
		                            B.text);

	SeriesT<C> ext = extend_vars(g, A.var_names, where);
	// assemble the full entry structure of A's region
	Window target = paren_window(A);
	for (size_t k = 1; k < na; ++k) {
		WinEntry &en = target.entries[k - 1];
		int anode = A.var_nodes[k];
		if (anode == ps) {
			int lc = A.nodes[ps].l;
			en.fl[0] = en.fl[1] = XRat(Rational(0));
			if (!A.is_leaf(lc)) {
				// the star sibling is a subtree; its B entry bounds carry over
				size_t lpos = A.var_pos(lc);
				size_t bpos = lpos - (lpos > ps_pos ? 1 : 0);
				en.fl[0] = g.window.entries.at(bpos - 1).fl[0];
				en.fl[1] = g.window.entries.at(bpos - 1).fl[1];
			}
			en.cap[0] = en.cap[1] = XRat(requested_cap);
			continue;
		}
		size_t bpos = k - (k > ps_pos ? 1 : 0);
		const WinEntry &use = g.window.entries.at(bpos - 1);
		for (int s = 0; s < 2; ++s) {
			en.fl[s] = use.fl[s];
			en.cap[s] = use.cap[s];
			en.ub[s] = en.w[ps_pos] != 0 ? XRat::inf() : use.ub[s];
		}
	}
	ext.window = target;
	ext.tag = SpaceTag::star;
	series_normalize(ext);

	std::vector<size_t> ws;
	for (size_t k = 0; k < na; ++k)
		if (k != ps_pos && A.nodes[A.var_nodes[k]].var_j == 0)
			ws.push_back(k);
	if (ws.empty())
		return ext; // star pairs with the root: no variable shifts
	return exp_derivation(ext, Rational(-1), ps_pos, ws);
}

/// the inversion involution I_d on star regions: z_i -> z_i^{-1}, reversing
/// the region order; exponents negate and exactness caps mirror
template <class C>
SeriesT<C> i_d(const SeriesT<C> &g, std::vector<std::string> new_names)
{
	size_t n = g.vars.size();
	if (new_names.size() != n)
		throw std::invalid_argument("i_d: arity mismatch");
	SeriesT<C> r;
	r.vars = std::move(new_names);
	r.tag = g.tag;
	for (const auto &en : g.window.entries) {
		WinEntry ne;
		ne.w.assign(n, Rational(0));
		for (size_t i = 0; i < n; ++i)
			ne.w[n - 1 - i] = -en.w[i];
		for (int s = 0; s < 2; ++s) {
			ne.cap[s] = en.cap[s];
			ne.fl[s] = -en.ub[s];
			ne.ub[s] = -en.fl[s];
		}
		r.window.entries.push_back(ne);
	}
	for (const auto &[m, c] : g.terms) {
		Monomial mm = Monomial::one(n);
		for (size_t i = 0; i < n; ++i) {
			mm.set(2 * (n - 1 - i), -m.hol(i));
			mm.set(2 * (n - 1 - i) + 1, -m.bar(i));
		}
		series_insert(r, mm, c);
	}
	return r;
}

} // namespace fva
