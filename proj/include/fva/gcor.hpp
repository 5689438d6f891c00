#pragma once

#include "fva/cor4.hpp"

namespace fva {

/// summand  coeff * z1^{a1} z2^{a2} (z1-z2)^{a12} (bars) * f(z2/z1)
struct GCor2Term
{
	Rational coeff = 1;
	Rational a1 = 0, a2 = 0, a12 = 0;
	Rational b1 = 0, b2 = 0, b12 = 0;
	ChartFunction f; // empty = constant 1
};

using GCor2Elem = std::vector<GCor2Term>;

enum class GRegion
{
	z1_gt_z2,
	z2_gt_z1,
	z2_gt_z0, // |z2| > |z1 - z2|, variables (z2, z0)
};

namespace detail {

/// U(y, z)-shaped window over two named variables
inline Series u_series(const std::string &outer, const std::string &inner)
{
	Series s;
	s.vars = {outer, inner};
	s.tag = SpaceTag::ugen;
	s.window = chain_window(2);
	return s;
}

/// sum_{i,j} binom(alpha,i) binom(beta,j) (c*in/out)^i (conj)^j as a series
inline Series binom_ratio(const std::string &outer, const std::string &inner,
                          const Rational &alpha, const Rational &beta, int csign,
                          const Rational &cap)
{
	Series s = detail::u_series(outer, inner);
	for (auto &en : s.window.entries) {
		en.fl[0] = en.fl[1] = XRat(Rational(0));
		en.cap[0] = en.cap[1] = XRat(cap);
	}
	for (long i = 0; Rational(i) <= cap; ++i) {
		Rational bi = binomial(alpha, i);
		if (is_integer(alpha) && alpha >= 0 && i > to_long(alpha))
			break;
		for (long j = 0; Rational(j) <= cap; ++j) {
			if (is_integer(beta) && beta >= 0 && j > to_long(beta))
				break;
			Rational c = bi * binomial(beta, j);
			if (csign < 0)
				c *= ((i + j) % 2) ? -1 : 1;
			if (c == 0)
				continue;
			Monomial m = Monomial::one(2);
			m.set(0, Rational(-i));
			m.set(1, Rational(-j));
			m.set(2, Rational(i));
			m.set(3, Rational(j));
			series_insert(s, m, c);
		}
	}
	return s;
}

inline Series ratio_monomial_inner(const std::string &outer,
                                   const std::string &inner, int sign,
                                   const Rational &cap)
{
	Series m = detail::u_series(outer, inner);
	for (auto &en : m.window.entries) {
		en.fl[0] = XRat(Rational(1));
		en.cap[0] = XRat(cap);
		en.fl[1] = XRat(Rational(0));
		en.ub[1] = XRat(Rational(0));
	}
	Monomial mono = Monomial::one(2);
	mono.set(0, Rational(-1));
	mono.set(2, Rational(1));
	m.terms.emplace(mono, Rational(sign));
	return m;
}

} // namespace detail

/// expansion of a generalized two point function in one of the three regions
inline Series gcor2_expand(const GCor2Elem &mu, GRegion region, const Rational &cap)
{
	Series acc;
	bool first = true;
	for (const GCor2Term &t : mu) {
		std::string vo, vi;
		Chart chart;
		Rational pre_o, pre_i, pre_ob, pre_ib, ba, bb;
		Rational sign = 1;
		switch (region) {
		case GRegion::z1_gt_z2:
			vo = "z1";
			vi = "z2";
			chart = Chart::p;
			pre_o = t.a1 + t.a12;
			pre_ob = t.b1 + t.b12;
			pre_i = t.a2;
			pre_ib = t.b2;
			ba = t.a12;
			bb = t.b12;
			break;
		case GRegion::z2_gt_z1:
			vo = "z2";
			vi = "z1";
			chart = Chart::inv_p;
			pre_o = t.a2 + t.a12;
			pre_ob = t.b2 + t.b12;
			pre_i = t.a1;
			pre_ib = t.b1;
			ba = t.a12;
			bb = t.b12;
			sign = parity_sign(t.a12 - t.b12);
			break;
		case GRegion::z2_gt_z0:
			vo = "z2";
			vi = "z0";
			chart = Chart::one_minus_1p;
			pre_o = t.a1 + t.a2;
			pre_ob = t.b1 + t.b2;
			pre_i = t.a12;
			pre_ib = t.b12;
			ba = t.a1;
			bb = t.b1;
			break;
		}
		int csign = region == GRegion::z2_gt_z0 ? +1 : -1;
		Series piece = detail::binom_ratio(vo, vi, ba, bb, csign, cap);
		bool have_f = !t.f.expansions.empty() || t.f.exact_form;
		if (have_f) {
			Series j = get_expansion(t.f, chart, cap);
			Series inner = detail::ratio_monomial_inner(
			    vo, vi, region == GRegion::z2_gt_z0 ? -1 : +1, cap);
			piece = series_mul(piece, substitute_pair(j, inner));
		}
		Monomial pm = Monomial::one(2);
		pm.set(0, pre_o);
		pm.set(1, pre_ob);
		pm.set(2, pre_i);
		pm.set(3, pre_ib);
		Series pre =
		    series_monomial<Rational>({vo, vi}, piece.window, pm,
		                              t.coeff * sign, SpaceTag::ugen);
		piece = series_mul(pre, piece);
		piece.tag = SpaceTag::ugen;
		if (first) {
			acc = piece;
			first = false;
		} else
			acc = series_add(acc, piece);
	}
	if (first)
		throw std::invalid_argument("gcor2_expand: empty element");
	return acc;
}

/// the substitution (z0, z2) -> (-z0/(z2(z2+z0)), 1/z2) realizing the
/// inversion I_Y on the |z2|>|z1-z2| expansion; an involution on U(z2,z0)
inline Series gcor2_dual(const Series &g)
{
	if (g.vars.size() != 2)
		throw std::invalid_argument("gcor2_dual: U(z2,z0) series expected");
	Series acc = series_zero_like(g);
	// (1 + z0/z2)^{-b}-type correction factors, truncated at the window cap
	const WinEntry &en = g.window.entries.at(0);
	for (const auto &[m, c] : g.terms) {
		const Rational &a = m.hol(0), &ab = m.bar(0);
		const Rational &b = m.hol(1), &bb = m.bar(1);
		if (!is_integer(b - bb))
			throw std::domain_error("gcor2_dual: conjugate integrality violated");
		Rational base_sign = parity_sign(b - bb);
		// generate binom(-b,k) binom(-bb,kb) (z0/z2)^{k,kb}
		for (long k = 0;; ++k) {
			if (!(XRat(b + k) <= en.cap[0]))
				break;
			Rational ck = binomial(-b, k);
			bool stop_k = is_integer(-b) && -b >= 0 && k > to_long(-b);
			if (stop_k)
				break;
			for (long kb = 0;; ++kb) {
				if (!(XRat(bb + kb) <= en.cap[1]))
					break;
				if (is_integer(-bb) && -bb >= 0 && kb > to_long(-bb))
					break;
				Rational ckb = binomial(-bb, kb);
				if (ck == 0 || ckb == 0)
					continue;
				Monomial mm = Monomial::one(2);
				mm.set(0, -a - 2 * b - k);
				mm.set(1, -ab - 2 * bb - kb);
				mm.set(2, b + k);
				mm.set(3, bb + kb);
				series_insert(acc, mm, c * base_sign * ck * ckb);
			}
		}
	}
	return acc;
}

} // namespace fva
