#pragma once

#include "fva/charts.hpp"
#include "fva/paren.hpp"

namespace fva {

/// coeff * prod_{i<j} (z_i - z_j)^{alpha_ij} (conj)^{beta_ij} on four points
struct FreeCorTerm
{
	Rational coeff = 1;
	std::map<std::pair<int, int>, std::pair<Rational, Rational>> exps; // 1-based

	void set(int i, int j, const Rational &alpha, const Rational &beta)
	{
		if (i == j || i < 1 || j < 1 || i > 4 || j > 4)
			throw std::invalid_argument("FreeCorTerm: bad pair");
		Rational a = alpha, b = beta;
		if (!is_integer(a - b))
			throw std::invalid_argument("FreeCorTerm: alpha-beta not integral");
		if (i > j) {
			std::swap(i, j);
			coeff *= parity_sign(a - b);
		}
		auto [it, fresh] = exps.emplace(std::make_pair(i, j), std::make_pair(a, b));
		if (!fresh) {
			it->second.first += a;
			it->second.second += b;
		}
	}
};

struct Cor4Term
{
	FreeCorTerm free;
	ChartFunction f; // absent parts fall back to the constant 1
};

using Cor4Elem = std::vector<Cor4Term>;

/// sigma . (free term): permuted points with the (-1)^{alpha-beta} sign
/// bookkeeping for reordered pairs
inline FreeCorTerm free_permute(const Perm4 &sigma, const FreeCorTerm &t)
{
	FreeCorTerm r;
	r.coeff = t.coeff;
	for (const auto &[ij, ab] : t.exps)
		r.set(int(sigma[size_t(ij.first - 1)]) + 1,
		      int(sigma[size_t(ij.second - 1)]) + 1, ab.first, ab.second);
	return r;
}

/// the cross-ratio (z1-z2)(z3-z4)/((z1-z3)(z2-z4)) as a free term
inline FreeCorTerm xi_free_term()
{
	FreeCorTerm t;
	t.set(1, 2, 1, 1);
	t.set(3, 4, 1, 1);
	t.set(1, 3, -1, -1);
	t.set(2, 4, -1, -1);
	return t;
}

/// z_i - z_j as a signed combination of the node variables of A
/// (path in the spanning tree on the points)
inline std::vector<std::pair<size_t, int>> path_combo(const Parenthesization &A,
                                                      int i, int j)
{
	size_t n = A.var_nodes.size();
	// adjacency over points 0..4 (0 = star)
	std::vector<std::vector<std::pair<int, size_t>>> adj(6);
	for (size_t k = 0; k < n; ++k) {
		const auto &nd = A.nodes[A.var_nodes[k]];
		adj[size_t(nd.var_i)].push_back({nd.var_j, k});
		adj[size_t(nd.var_j)].push_back({nd.var_i, k});
	}
	std::vector<int> prev(6, -1);
	std::vector<std::pair<size_t, int>> via(6);
	std::vector<int> stack{i};
	prev[size_t(i)] = i;
	while (!stack.empty()) {
		int a = stack.back();
		stack.pop_back();
		for (auto [b, k] : adj[size_t(a)]) {
			if (prev[size_t(b)] != -1)
				continue;
			prev[size_t(b)] = a;
			const auto &nd = A.nodes[A.var_nodes[k]];
			via[size_t(b)] = {k, nd.var_i == a ? +1 : -1};
			stack.push_back(b);
		}
	}
	if (prev[size_t(j)] == -1)
		throw std::invalid_argument("points not connected by node variables");
	std::vector<std::pair<size_t, int>> combo;
	for (int b = j; b != i; b = prev[size_t(b)]) {
		// z_i - z_j = sum over path steps of (z_{p_t} - z_{p_{t+1}});
		// the step prev[b] -> b contributes via[b].second * v_k
		combo.push_back({via[size_t(b)].first, via[size_t(b)].second});
	}
	return combo;
}

/// expansion of (sum_k c_k v_k)^alpha (conj)^beta in the region of A
inline Series power_expand_combo(const Parenthesization &A,
                                 const std::vector<std::pair<size_t, int>> &combo,
                                 const Rational &alpha, const Rational &beta,
                                 const Rational &cap)
{
	if (!is_integer(alpha - beta))
		throw std::invalid_argument("power_expand: alpha-beta not integral");
	size_t n = A.var_nodes.size();
	Window base = paren_window(A);
	// dominant variable: ancestor of all others in the region order
	size_t dom = 0;
	bool found = false;
	for (auto [k, c] : combo) {
		bool anc = true;
		for (auto [k2, c2] : combo)
			if (!A.ancestor_of(A.var_nodes[k], A.var_nodes[k2]))
				anc = false;
		if (anc) {
			dom = k;
			found = true;
			break;
		}
	}
	if (!found)
		throw std::domain_error("power_expand: no dominant variable in region");
	int c0 = 0;
	for (auto [k, c] : combo)
		if (k == dom)
			c0 = c;

	// u = sum_{k != dom} (c_k/c0) v_k/v_dom as an exact series
	Series u;
	u.vars = A.var_names;
	u.window = base;
	for (auto [k, c] : combo) {
		if (k == dom)
			continue;
		Monomial m = Monomial::one(n);
		m.set(2 * k, Rational(1));
		m.set(2 * dom, Rational(-1));
		series_insert(u, m, Rational(c * c0));
	}
	window_tighten_exact(u);
	for (size_t e = 0; e < u.window.entries.size(); ++e) {
		Rational ev0 = base.entries[e].w[dom];
		u.window.entries[e].cap[0] = XRat(cap - alpha * ev0);
		u.window.entries[e].cap[1] = XRat(cap - beta * ev0);
	}
	Series bh = binom_series(u, alpha);
	Series bb = binom_series(conjugate_series(u), beta);

	Monomial lead = Monomial::one(n);
	lead.set(2 * dom, alpha);
	lead.set(2 * dom + 1, beta);
	Rational sign = c0 < 0 ? parity_sign(alpha - beta) : 1;
	Series head = series_monomial<Rational>(A.var_names, bh.window, lead, sign);
	Series out = series_mul(head, series_mul(bh, bb));
	// non-negative integer powers expand to exact Laurent polynomials
	if (is_integer(alpha) && alpha >= 0 && is_integer(beta) && beta >= 0)
		window_tighten_exact(out);
	return out;
}

/// e_A^f: binomial expansion of a free term in the region of A
inline Series expand_free(const FreeCorTerm &t, const Parenthesization &A,
                          const Rational &cap)
{
	size_t n = A.var_nodes.size();
	Series acc;
	acc.vars = A.var_names;
	acc.window = paren_window(A);
	acc.tag = is_channel_class(A) ? SpaceTag::channel : SpaceTag::chain_f;
	series_insert(acc, Monomial::one(n), t.coeff);
	window_tighten_exact(acc);
	for (const auto &[ij, ab] : t.exps) {
		if (ab.first == 0 && ab.second == 0)
			continue;
		Series factor = power_expand_combo(A, path_combo(A, ij.first, ij.second),
		                                   ab.first, ab.second, cap);
		SpaceTag tag = acc.tag;
		acc = series_mul(acc, factor);
		acc.tag = tag;
	}
	return acc;
}

/// e_A^f(tau(A) . xi): the substitution kernel of s_A; holomorphic-pure with
/// strictly positive leading valuation
inline Series expand_xi(const Parenthesization &A, const Rational &cap)
{
	FreeCorTerm t = free_permute(tau(A), xi_free_term());
	// drop the beta side: xi is holomorphic, expand only the unbarred factors
	for (auto &[ij, ab] : t.exps)
		ab.second = 0;
	return expand_free(t, A, cap);
}

/// expansion map e_A on Cor4, truncated at cap per tracked direction
inline Series e_A(const Cor4Elem &phi, const Parenthesization &A, const Rational &cap)
{
	if (A.has_star || A.nleaves != 4)
		throw std::invalid_argument("e_A: P4 element expected");
	Chart chart = chart_act(tau(A), Chart::p);
	Series acc;
	bool first = true;
	for (const Cor4Term &term : phi) {
		Series free = expand_free(term.free, A, cap);
		Series piece;
		if (term.f.expansions.empty() && !term.f.exact_form) {
			piece = free; // constant 1
		} else {
			Series j = get_expansion(term.f, chart, cap);
			Rational neg = 0;
			const WinEntry &oe = j.window.entries[0];
			for (int s = 0; s < 2; ++s)
				if (oe.fl[s].finite() && oe.fl[s].v < 0)
					neg = std::max(neg, -oe.fl[s].v);
			// deep enough that the substituted window still reaches cap;
			// the channel substitution consumes twice the depth
			Rational slack = is_channel_class(A)
			                     ? cap + 2 * neg + 2
			                     : neg + 1;
			Series xi = expand_xi(A, cap + slack);
			Series sub = substitute_pair(j, xi);
			piece = series_mul(free, sub);
		}
		piece.tag = is_channel_class(A) ? SpaceTag::channel : SpaceTag::chain;
		if (first) {
			acc = piece;
			first = false;
		} else
			acc = series_add(acc, piece);
	}
	if (first)
		throw std::invalid_argument("e_A: empty Cor4 element");
	return acc;
}

/// sigma . phi termwise
inline Cor4Elem s4_act_cor4(const Perm4 &sigma, const Cor4Elem &phi,
                            const Rational &cap)
{
	Cor4Elem out;
	for (const Cor4Term &t : phi) {
		Cor4Term r;
		r.free = free_permute(sigma, t.free);
		if (t.f.expansions.empty() && !t.f.exact_form)
			r.f = t.f;
		else
			r.f = act_s4(sigma, t.f, cap);
		out.push_back(std::move(r));
	}
	return out;
}

/// the Q(h, z) prefactor of quasi-primary four-point functions
inline FreeCorTerm q_prefactor(const std::array<Rational, 4> &h,
                               const std::array<Rational, 4> &hb)
{
	for (int i = 0; i < 4; ++i)
		if (!is_integer(h[size_t(i)] - hb[size_t(i)]))
			throw std::invalid_argument("q_prefactor: h - hbar not integral");
	FreeCorTerm t;
	t.set(1, 2, -2 * h[1], -2 * hb[1]);
	t.set(3, 4, h[0] - h[1] - h[2] - h[3], hb[0] - hb[1] - hb[2] - hb[3]);
	t.set(1, 4, h[1] - h[0] + h[2] - h[3], hb[1] - hb[0] + hb[2] - hb[3]);
	t.set(1, 3, h[1] - h[0] - h[2] + h[3], hb[1] - hb[0] - hb[2] + hb[3]);
	return t;
}

} // namespace fva
