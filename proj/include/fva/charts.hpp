#pragma once

#include "fva/compose.hpp"
#include "fva/series.hpp"
#include <array>
#include <map>
#include <optional>

namespace fva {

/// the six standard charts of CP^1 \ {0,1,inf}; each is also an element of
/// Aut(0,1,inf), so the same table serves both purposes
enum class Chart
{
	p,            // at 0
	p_over_pm1,   // p/(p-1), at 0
	one_minus_p,  // 1-p, at 1
	one_minus_1p, // 1-1/p, at 1
	inv_p,        // 1/p, at inf
	inv_1mp,      // 1/(1-p), at inf
};

constexpr std::array<Chart, 6> all_charts{Chart::p,            Chart::p_over_pm1,
                                          Chart::one_minus_p,  Chart::one_minus_1p,
                                          Chart::inv_p,        Chart::inv_1mp};

inline const char *chart_name(Chart c)
{
	switch (c) {
	case Chart::p:
		return "p";
	case Chart::p_over_pm1:
		return "p/(p-1)";
	case Chart::one_minus_p:
		return "1-p";
	case Chart::one_minus_1p:
		return "1-1/p";
	case Chart::inv_p:
		return "1/p";
	case Chart::inv_1mp:
		return "1/(1-p)";
	}
	return "?";
}

inline std::optional<Chart> chart_from_name(const std::string &s)
{
	for (Chart c : all_charts)
		if (s == chart_name(c))
			return c;
	return std::nullopt;
}

/// 0, 1 or 2 (for infinity): the point at which the chart vanishes
inline int chart_base_point(Chart c)
{
	switch (c) {
	case Chart::p:
	case Chart::p_over_pm1:
		return 0;
	case Chart::one_minus_p:
	case Chart::one_minus_1p:
		return 1;
	default:
		return 2;
	}
}

/// integral 2x2 matrix modulo scalars acting as (a p + b)/(c p + d)
struct Mobius
{
	BigInt a = 1, b = 0, c = 0, d = 1;

	void normalize()
	{
		BigInt g = gcd(gcd(abs(a), abs(b)), gcd(abs(c), abs(d)));
		if (g > 1) {
			a /= g;
			b /= g;
			c /= g;
			d /= g;
		}
		BigInt *lead = nullptr;
		for (BigInt *x : {&a, &b, &c, &d})
			if (*x != 0) {
				lead = x;
				break;
			}
		if (lead && *lead < 0) {
			a = -a;
			b = -b;
			c = -c;
			d = -d;
		}
	}
};

inline bool operator==(const Mobius &x, const Mobius &y)
{
	return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
}

inline Mobius mobius_mul(const Mobius &x, const Mobius &y)
{
	Mobius r;
	r.a = x.a * y.a + x.b * y.c;
	r.b = x.a * y.b + x.b * y.d;
	r.c = x.c * y.a + x.d * y.c;
	r.d = x.c * y.b + x.d * y.d;
	r.normalize();
	return r;
}

inline Mobius mobius_inv(const Mobius &x)
{
	Mobius r;
	r.a = x.d;
	r.b = -x.b;
	r.c = -x.c;
	r.d = x.a;
	r.normalize();
	return r;
}

/// image of a point of {0,1,inf} (coded 0,1,2) under the matrix
inline int mobius_apply_point(const Mobius &m, int pt)
{
	BigInt n, d;
	switch (pt) {
	case 0:
		n = m.b;
		d = m.d;
		break;
	case 1:
		n = m.a + m.b;
		d = m.c + m.d;
		break;
	default:
		n = m.a;
		d = m.c;
		break;
	}
	if (d == 0)
		return 2;
	if (n == 0)
		return 0;
	if (n == d)
		return 1;
	throw std::domain_error("mobius_apply_point: does not preserve {0,1,inf}");
}

inline Mobius chart_matrix(Chart c)
{
	switch (c) {
	case Chart::p:
		return {1, 0, 0, 1};
	case Chart::p_over_pm1:
		return {1, 0, 1, -1};
	case Chart::one_minus_p:
		return {-1, 1, 0, 1};
	case Chart::one_minus_1p:
		return {1, -1, 1, 0};
	case Chart::inv_p:
		return {0, 1, 1, 0};
	case Chart::inv_1mp:
		return {0, 1, -1, 1};
	}
	throw std::logic_error("chart_matrix");
}

inline Chart chart_from_matrix(Mobius m)
{
	m.normalize();
	for (Chart c : all_charts) {
		Mobius cm = chart_matrix(c);
		cm.normalize();
		if (cm == m)
			return c;
	}
	throw std::domain_error("matrix is not one of the six charts");
}

/// a permutation of {1,2,3,4}; perm[i] is the image of i (0-based)
using Perm4 = std::array<uint8_t, 4>;

inline Perm4 perm4_identity() { return {0, 1, 2, 3}; }
inline Perm4 perm4_mul(const Perm4 &s, const Perm4 &t)
{
	// (s*t)(i) = s(t(i))
	Perm4 r;
	for (int i = 0; i < 4; ++i)
		r[i] = s[t[i]];
	return r;
}
inline Perm4 perm4_inv(const Perm4 &s)
{
	Perm4 r{};
	for (int i = 0; i < 4; ++i)
		r[s[i]] = uint8_t(i);
	return r;
}
/// transposition/cycle helper: perm4({2,1,3,4}) style 1-based input
inline Perm4 perm4(std::initializer_list<int> images)
{
	Perm4 r{};
	int i = 0;
	for (int v : images)
		r[i++] = uint8_t(v - 1);
	return r;
}

inline std::vector<Perm4> all_perm4()
{
	std::vector<Perm4> out;
	Perm4 p = perm4_identity();
	std::array<int, 4> idx{0, 1, 2, 3};
	std::sort(idx.begin(), idx.end());
	do {
		for (int i = 0; i < 4; ++i)
			p[i] = uint8_t(idx[i]);
		out.push_back(p);
	} while (std::next_permutation(idx.begin(), idx.end()));
	return out;
}

/// element of Aut(0,1,inf) = S3, stored both as the induced permutation of
/// {0,1,inf} and as a matrix class in PSL2
struct AutElement
{
	std::array<uint8_t, 3> perm{0, 1, 2}; // images of 0,1,inf
	Mobius mat;
};

/// the homomorphism t : S4 -> Aut(0,1,inf); kernel is the Klein group.
/// sigma permutes the pairings {12|34, 14|23, 13|24} which sit over the
/// points 0, 1, inf of the cross-ratio.
inline AutElement s4_to_aut(const Perm4 &sigma)
{
	auto pairing = [](int a, int b) {
		// 0: 12|34  1: 14|23  2: 13|24 (a pair and its complement agree)
		if (a > b)
			std::swap(a, b);
		if ((a == 0 && b == 1) || (a == 2 && b == 3))
			return 0;
		if ((a == 0 && b == 3) || (a == 1 && b == 2))
			return 1;
		return 2;
	};
	AutElement t;
	// the pairing containing {sigma(0), sigma(1)} is the image of point 0, etc.
	t.perm[0] = uint8_t(pairing(sigma[0], sigma[1]));
	t.perm[1] = uint8_t(pairing(sigma[0], sigma[3]));
	t.perm[2] = uint8_t(pairing(sigma[0], sigma[2]));
	static const std::map<std::array<uint8_t, 3>, Mobius> mats = {
	    {{0, 1, 2}, {1, 0, 0, 1}},   // identity
	    {{1, 0, 2}, {-1, 1, 0, 1}},  // (01): 1-p
	    {{2, 1, 0}, {0, 1, 1, 0}},   // (0 inf): 1/p
	    {{0, 2, 1}, {1, 0, 1, -1}},  // (1 inf): p/(p-1)
	    {{1, 2, 0}, {0, 1, -1, 1}},  // (0 1 inf): 1/(1-p)
	    {{2, 0, 1}, {1, -1, 1, 0}},  // (0 inf 1): 1-1/p
	};
	t.mat = mats.at(t.perm);
	t.mat.normalize();
	return t;
}

/// sigma . chart = chart composed with t_sigma^{-1}
inline Chart chart_act(const Perm4 &sigma, Chart chi)
{
	Mobius m = mobius_mul(chart_matrix(chi), mobius_inv(s4_to_aut(sigma).mat));
	return chart_from_matrix(m);
}

/// signed Laurent monomial  sign * p^a (1-p)^b
struct SignedMono
{
	int sign;
	long a, b;
};

/// images of the generators p and 1-p under the rational map g (one of the
/// six chart maps): p -> img_p, (1-p) -> img_q
inline std::pair<SignedMono, SignedMono> generator_images(Chart g)
{
	switch (g) {
	case Chart::p:
		return {{+1, 1, 0}, {+1, 0, 1}};
	case Chart::one_minus_p:
		return {{+1, 0, 1}, {+1, 1, 0}};
	case Chart::inv_p:
		return {{+1, -1, 0}, {-1, -1, 1}};
	case Chart::p_over_pm1:
		return {{-1, 1, -1}, {+1, 0, -1}};
	case Chart::one_minus_1p:
		return {{-1, -1, 1}, {+1, -1, 0}};
	case Chart::inv_1mp:
		return {{+1, 0, -1}, {-1, 1, -1}};
	}
	throw std::logic_error("generator_images");
}

/// element of Q[p^{+-}, (1-p)^{+-}]: exponent pair -> coefficient
struct ExactForm
{
	std::map<std::pair<long, long>, Rational> coef;

	static ExactForm constant(const Rational &c)
	{
		ExactForm f;
		if (c != 0)
			f.coef[{0, 0}] = c;
		return f;
	}
	static ExactForm monomial(const Rational &c, long a, long b)
	{
		ExactForm f;
		if (c != 0)
			f.coef[{a, b}] = c;
		return f;
	}
	void add_term(long a, long b, const Rational &c)
	{
		auto [it, fresh] = coef.emplace(std::make_pair(a, b), c);
		if (!fresh) {
			it->second += c;
			if (it->second == 0)
				coef.erase(it);
		}
	}
};

inline ExactForm operator+(const ExactForm &x, const ExactForm &y)
{
	ExactForm r = x;
	for (const auto &[k, c] : y.coef)
		r.add_term(k.first, k.second, c);
	return r;
}

inline ExactForm operator*(const ExactForm &x, const ExactForm &y)
{
	ExactForm r;
	for (const auto &[kx, cx] : x.coef)
		for (const auto &[ky, cy] : y.coef)
			r.add_term(kx.first + ky.first, kx.second + ky.second, cx * cy);
	return r;
}

/// canonical basis: pure Laurent monomials p^k together with (1-p)^{-n},
/// n >= 1 (a partial-fraction normal form; these are linearly independent)
inline ExactForm exact_form_canonical(const ExactForm &f)
{
	ExactForm r;
	// process with an explicit stack of raw terms
	std::vector<std::tuple<long, long, Rational>> work;
	for (const auto &[k, c] : f.coef)
		work.push_back({k.first, k.second, c});
	while (!work.empty()) {
		auto [a, b, c] = work.back();
		work.pop_back();
		if (c == 0)
			continue;
		if (b == 0) {
			r.add_term(a, 0, c);
		} else if (b > 0) {
			for (long j = 0; j <= b; ++j)
				r.add_term(a + j, 0, c * binomial(Rational(b), j) * (j % 2 ? -1 : 1));
		} else if (a > 0) {
			// p^a (1-p)^b = p^{a-1}(1-p)^b - p^{a-1}(1-p)^{b+1}
			work.push_back({a - 1, b, c});
			work.push_back({a - 1, b + 1, -c});
		} else if (a == 0) {
			r.add_term(0, b, c);
		} else {
			// p^a (1-p)^b = p^{a+1}(1-p)^b + p^a(1-p)^{b+1}
			work.push_back({a + 1, b, c});
			work.push_back({a, b + 1, c});
		}
	}
	return r;
}

inline bool operator==(const ExactForm &x, const ExactForm &y)
{
	return exact_form_canonical(x).coef == exact_form_canonical(y).coef;
}

/// substitute the rational map g into the form: f -> f(g(p))
inline ExactForm exact_form_compose(const ExactForm &f, Chart g)
{
	auto [ip, iq] = generator_images(g);
	ExactForm r;
	for (const auto &[k, c] : f.coef) {
		long sa = (k.first % 2 != 0 && ip.sign < 0) ? -1 : 1;
		long sb = (k.second % 2 != 0 && iq.sign < 0) ? -1 : 1;
		r.add_term(ip.a * k.first + iq.a * k.second,
		           ip.b * k.first + iq.b * k.second, c * sa * sb);
	}
	return r;
}

/// expansion of the form around p = 0 up to the cap (a holomorphic BiSeries)
inline Series exact_form_expand(const ExactForm &f, const Rational &cap)
{
	Series out;
	out.vars = {"p"};
	out.tag = SpaceTag::bi;
	out.window = bi_window();
	WinEntry &en = out.window.entries[0];
	long lo = 0;
	for (const auto &[k, c] : f.coef)
		lo = std::min(lo, k.first);
	en.fl[0] = XRat(Rational(lo));
	en.cap[0] = XRat(cap);
	en.fl[1] = XRat(Rational(0));
	en.ub[1] = XRat(Rational(0));
	en.cap[1] = XRat::inf();
	for (const auto &[k, c] : f.coef) {
		long a = k.first, b = k.second;
		if (b >= 0) {
			for (long j = 0; j <= b; ++j) {
				Monomial m = Monomial::one(1);
				m.set(0, Rational(a + j));
				series_insert(out, m,
				              c * binomial(Rational(b), j) * (j % 2 ? -1 : 1));
			}
		} else {
			for (long j = 0; Rational(a + j) <= cap; ++j) {
				Monomial m = Monomial::one(1);
				m.set(0, Rational(a + j));
				series_insert(out, m,
				              c * binomial(Rational(b), j) * (j % 2 ? -1 : 1));
			}
		}
	}
	return out;
}

/// f in F_{0,1,inf} given by its chart expansions, with an optional exact
/// rational form.  Expansions may be partial.
struct ChartFunction
{
	std::map<Chart, Series> expansions;
	std::optional<ExactForm> exact_form;
};

/// same-base-point partner of a chart
inline Chart chart_partner(Chart c)
{
	switch (c) {
	case Chart::p:
		return Chart::p_over_pm1;
	case Chart::p_over_pm1:
		return Chart::p;
	case Chart::one_minus_p:
		return Chart::one_minus_1p;
	case Chart::one_minus_1p:
		return Chart::one_minus_p;
	case Chart::inv_p:
		return Chart::inv_1mp;
	default:
		return Chart::inv_p;
	}
}

/// the series  -sum_{n>=1} p^n  (the map p/(p-1) expanded at 0), to cap
inline Series dihedral_inner(const Rational &cap)
{
	Series f;
	f.vars = {"p"};
	f.tag = SpaceTag::bi;
	f.window = bi_window();
	WinEntry &en = f.window.entries[0];
	en.fl[0] = XRat(Rational(1));
	en.cap[0] = XRat(cap);
	en.fl[1] = XRat(Rational(0));
	en.ub[1] = XRat(Rational(0));
	en.cap[1] = XRat::inf();
	for (long n = 1; Rational(n) <= cap; ++n) {
		Monomial m = Monomial::one(1);
		m.set(0, Rational(n));
		series_insert(f, m, Rational(-1));
	}
	return f;
}

/// the expansion of f at chart chi: stored, or derived from the exact form,
/// or derived from the same-point partner chart by the dihedral substitution
inline Series get_expansion(const ChartFunction &f, Chart chi, const Rational &cap)
{
	auto it = f.expansions.find(chi);
	if (it != f.expansions.end())
		return it->second;
	if (f.exact_form)
		return exact_form_expand(exact_form_compose(*f.exact_form, chi), cap);
	auto pt = f.expansions.find(chart_partner(chi));
	if (pt != f.expansions.end())
		return substitute_pair(pt->second, dihedral_inner(cap));
	throw std::domain_error(std::string("missing chart expansion at ") +
	                        chart_name(chi));
}

/// j(chi, sigma . f) = j(sigma^{-1} . chi, f) implemented as a relabeling,
/// with the dihedral substitution and the exact form filling gaps
inline ChartFunction act_s4(const Perm4 &sigma, const ChartFunction &f,
                            const Rational &cap)
{
	ChartFunction out;
	if (f.exact_form) {
		Mobius g = mobius_inv(s4_to_aut(sigma).mat);
		out.exact_form = exact_form_compose(*f.exact_form, chart_from_matrix(g));
	}
	Perm4 si = perm4_inv(sigma);
	for (Chart chi : all_charts) {
		Chart src = chart_act(si, chi);
		try {
			out.expansions.emplace(chi, get_expansion(f, src, cap));
		} catch (const std::domain_error &) {
			// chart not derivable; leave absent
		}
	}
	if (out.expansions.empty() && !out.exact_form)
		throw std::domain_error("act_s4: no source charts available");
	return out;
}

/// all six expansions of an exact rational function
inline ChartFunction make_rational(const ExactForm &expr, const Rational &cap)
{
	ChartFunction f;
	f.exact_form = expr;
	for (Chart chi : all_charts)
		f.expansions.emplace(chi, exact_form_expand(exact_form_compose(expr, chi), cap));
	return f;
}

inline ChartFunction make_constant_function(const Rational &c)
{
	// constants need no truncation anywhere
	ChartFunction f;
	f.exact_form = ExactForm::constant(c);
	for (Chart chi : all_charts) {
		Series s;
		s.vars = {"p"};
		s.tag = SpaceTag::bi;
		s.window = bi_window();
		WinEntry &en = s.window.entries[0];
		en.fl[0] = en.fl[1] = XRat(Rational(0));
		en.ub[0] = en.ub[1] = XRat(Rational(0));
		if (c != 0)
			s.terms.emplace(Monomial::one(1), c);
		f.expansions.emplace(chi, s);
	}
	return f;
}

/// |X|^{1/2} of a series X = c p^a (1 + u) with positive leading coefficient
inline Series pair_half_power(const Series &x)
{
	Series outer;
	outer.vars = {"q"};
	outer.tag = SpaceTag::bi;
	outer.window = bi_window();
	Monomial m = Monomial::one(1);
	m.set(0, Rational(1, 2));
	m.set(1, Rational(1, 2));
	outer.terms.emplace(m, Rational(1));
	window_tighten_exact(outer);
	return substitute_pair(outer, x);
}

/// f_Ising(p) = |1 - sqrt(1-p)|^{1/2} + |1 + sqrt(1-p)|^{1/2} at chart p;
/// the chart 1-p is filled through the symmetry f(p) = f(1-p)
inline ChartFunction ising_function(const Rational &cap)
{
	// sqrt(1-p) as a holomorphic series
	Series s;
	s.vars = {"p"};
	s.tag = SpaceTag::bi;
	s.window = bi_window();
	{
		WinEntry &en = s.window.entries[0];
		en.fl[0] = XRat(Rational(0));
		en.cap[0] = XRat(cap + 1);
		en.fl[1] = XRat(Rational(0));
		en.ub[1] = XRat(Rational(0));
		en.cap[1] = XRat::inf();
	}
	for (long k = 0; Rational(k) <= cap + 1; ++k) {
		Monomial m = Monomial::one(1);
		m.set(0, Rational(k));
		series_insert(s, m, binomial(Rational(1, 2), k) * (k % 2 ? -1 : 1));
	}
	Series one = series_monomial<Rational>({"p"}, s.window, Monomial::one(1),
	                                       Rational(1), SpaceTag::bi);
	Series a = series_sub(one, s); // 1 - sqrt(1-p) = p/2 + ...
	Series b = series_add(one, s); // 1 + sqrt(1-p) = 2 - p/2 - ...
	// tight floors so the dominant split sees p^1 resp. p^0
	a.window.entries[0].fl[0] = XRat(Rational(1));
	b.window.entries[0].fl[0] = XRat(Rational(0));
	Series f = series_add(pair_half_power(a), pair_half_power(b));
	f.vars = {"p"};
	ChartFunction out;
	out.expansions.emplace(Chart::p, f);
	out.expansions.emplace(Chart::one_minus_p, f);
	return out;
}

enum class HolClass
{
	rational,
	not_holomorphic,
	undetermined,
};

struct HolReport
{
	HolClass kind;
	std::optional<ExactForm> form;
};

/// decide whether the chart-p expansion is the expansion of an element of
/// Q[p^{+-},(1-p)^{+-}] visible at this window
inline HolReport holomorphic_classify(const ChartFunction &f)
{
	auto it = f.expansions.find(Chart::p);
	if (it == f.expansions.end())
		throw std::domain_error("holomorphic_classify: chart p absent");
	const Series &s = it->second;
	for (const auto &[m, c] : s.terms)
		if (m.bar(0) != 0)
			return {HolClass::not_holomorphic, std::nullopt};
	for (const auto &[m, c] : s.terms)
		if (!is_integer(m.hol(0)))
			return {HolClass::not_holomorphic, std::nullopt};

	XRat capx = s.window.entries[0].cap[0];
	if (s.terms.empty())
		return capx.finite()
		           ? HolReport{HolClass::undetermined, std::nullopt}
		           : HolReport{HolClass::rational, ExactForm::constant(0)};
	if (!capx.finite()) {
		// a finite exact Laurent polynomial in p alone: also in the ring
		ExactForm ef;
		for (const auto &[m, c] : s.terms)
			ef.add_term(to_long(m.hol(0)), 0, c);
		return {HolClass::rational, ef};
	}
	long cap = capx.finite() ? static_cast<long>(floor_int(capx.v)) : 0;
	long lo = 0;
	for (const auto &[m, c] : s.terms)
		lo = std::min(lo, static_cast<long>(floor_int(m.hol(0))));
	auto coeff_at = [&](long n) {
		Monomial m = Monomial::one(1);
		m.set(0, Rational(n));
		auto jt = s.terms.find(m);
		return jt == s.terms.end() ? Rational(0) : jt->second;
	};
	long budget = (cap - lo) / 2;
	for (long n = 0; n <= budget; ++n) {
		// candidate: p^lo * (1-p)^{-n} * poly of degree <= budget
		std::vector<Rational> poly(size_t(budget + 1), Rational(0));
		// poly = series * (1-p)^n  truncated
		for (long d = 0; d <= budget; ++d) {
			Rational v = 0;
			for (long j = 0; j <= std::min(d, n); ++j)
				v += binomial(Rational(n), j) * (j % 2 ? -1 : 1) *
				     coeff_at(lo + d - j);
			poly[size_t(d)] = v;
		}
		// verify the tail (budget, cap-lo] vanishes
		bool ok = true;
		for (long d = budget + 1; d <= cap - lo && ok; ++d) {
			Rational v = 0;
			for (long j = 0; j <= std::min(d, n); ++j)
				v += binomial(Rational(n), j) * (j % 2 ? -1 : 1) *
				     coeff_at(lo + d - j);
			if (v != 0)
				ok = false;
		}
		if (!ok || cap - lo <= budget)
			continue;
		ExactForm ef;
		for (long d = 0; d <= budget; ++d)
			if (poly[size_t(d)] != 0)
				ef = ef + (ExactForm::monomial(poly[size_t(d)], lo + d, -n));
		// final check: reexpand and compare on the full window
		Series back = exact_form_expand(ef, capx.finite() ? capx.v : Rational(cap));
		if (compare_on_window(back, s).empty())
			return {HolClass::rational, ef};
	}
	return {HolClass::undetermined, std::nullopt};
}

} // namespace fva
