#pragma once

#include "fva/window.hpp"
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fva {

namespace detail {
// fixed-point shadow representation: exponents in practice have small
// denominators, so ordering and dot products run in int64 scaled by
// lcm(1..13) = 720720, with a transparent slow path for anything else
constexpr long fast_scale = 720720;
constexpr long fast_limit = 400000000; // |value| bound, sums stay in int64

inline bool fast_of(const Rational &q, long &out)
{
	const BigInt &n = numerator(q), &d = denominator(q);
	if (d > fast_scale || fast_scale % d != 0)
		return false;
	if (n > 1000000 || n < -1000000)
		return false;
	out = static_cast<long>(n) * (fast_scale / static_cast<long>(d));
	return std::abs(out) < fast_limit;
}
} // namespace detail

/// Exponent vector of one term: e[2*i] is the exponent of variable i,
/// e[2*i+1] the exponent of its conjugate.  The total is cached for the
/// canonical ordering; a fixed-point shadow keeps comparisons in int64.
struct Monomial
{
	Rational total = 0;
	std::vector<Rational> e;
	long total_fp = 0;
	std::vector<long> fp; // empty when some exponent has no fast form

	static Monomial one(size_t nvars)
	{
		Monomial m;
		m.e.assign(2 * nvars, Rational(0));
		m.fp.assign(2 * nvars, 0);
		return m;
	}

	const Rational &hol(size_t i) const { return e[2 * i]; }
	const Rational &bar(size_t i) const { return e[2 * i + 1]; }
	bool fast() const { return !fp.empty(); }

	void set(size_t slot, const Rational &v)
	{
		total += v - e[slot];
		e[slot] = v;
		if (!fp.empty()) {
			long x;
			if (detail::fast_of(v, x)) {
				total_fp += x - fp[slot];
				fp[slot] = x;
			} else
				fp.clear();
		}
	}
	void add(size_t slot, const Rational &v)
	{
		total += v;
		e[slot] += v;
		if (!fp.empty()) {
			long x;
			if (detail::fast_of(e[slot], x)) {
				total_fp += x - fp[slot];
				fp[slot] = x;
			} else
				fp.clear();
		}
	}
};

inline bool operator<(const Monomial &a, const Monomial &b)
{
	if (a.fast() && b.fast()) {
		if (a.total_fp != b.total_fp)
			return a.total_fp < b.total_fp;
		return a.fp < b.fp;
	}
	if (a.total != b.total)
		return a.total < b.total;
	return a.e < b.e;
}
inline bool operator==(const Monomial &a, const Monomial &b)
{
	if (a.fast() && b.fast())
		return a.fp == b.fp;
	return a.e == b.e;
}

inline Monomial mono_mul(const Monomial &a, const Monomial &b)
{
	Monomial r = a;
	r.total += b.total;
	for (size_t i = 0; i < r.e.size(); ++i)
		r.e[i] += b.e[i];
	if (a.fast() && b.fast()) {
		r.total_fp += b.total_fp;
		bool ok = true;
		for (size_t i = 0; i < r.fp.size(); ++i) {
			r.fp[i] += b.fp[i];
			if (std::abs(r.fp[i]) >= detail::fast_limit)
				ok = false;
		}
		if (!ok)
			r.fp.clear();
	} else
		r.fp.clear();
	return r;
}

enum class SpaceTag
{
	generic,
	bi,        // C((p, pbar, |p|^R))
	chain,     // T(x,y,z) and friends, nested region chain
	chain_f,   // T^f subspace
	channel,   // T_{(12)(34)} style space
	star,      // T^* four-variable space
	ugen,      // U(y,z) generalized two point space
};

template <class C> struct SeriesT
{
	std::vector<std::string> vars;
	std::map<Monomial, C> terms;
	Window window;
	SpaceTag tag = SpaceTag::generic;

	size_t var_index(const std::string &name) const
	{
		for (size_t i = 0; i < vars.size(); ++i)
			if (vars[i] == name)
				return i;
		throw std::invalid_argument("unknown variable " + name);
	}
};

using Series = SeriesT<Rational>;

inline Rational entry_value(const WinEntry &en, const Monomial &m, int side)
{
	if (m.fast()) {
		long acc = 0;
		bool fast = true;
		for (size_t i = 0; i < en.w.size() && fast; ++i) {
			if (en.w[i] == 0)
				continue;
			if (en.w[i] == 1)
				acc += m.fp[2 * i + side];
			else if (en.w[i] == -1)
				acc -= m.fp[2 * i + side];
			else
				fast = false;
		}
		if (fast)
			return Rational(acc, detail::fast_scale);
	}
	Rational v = 0;
	for (size_t i = 0; i < en.w.size(); ++i)
		if (en.w[i] != 0)
			v += en.w[i] * m.e[2 * i + side];
	return v;
}

/// fixed-point entry value when both the monomial and the weights admit it
inline bool entry_value_fp(const WinEntry &en, const Monomial &m, int side,
                           long &out)
{
	if (!m.fast())
		return false;
	long acc = 0;
	for (size_t i = 0; i < en.w.size(); ++i) {
		if (en.w[i] == 0)
			continue;
		if (en.w[i] == 1)
			acc += m.fp[2 * i + side];
		else if (en.w[i] == -1)
			acc -= m.fp[2 * i + side];
		else
			return false;
	}
	out = acc;
	return true;
}

inline bool in_caps(const Window &w, const Monomial &m)
{
	for (const auto &en : w.entries)
		for (int s = 0; s < 2; ++s)
			if (!(entry_value(en, m, s) <= en.cap[s]))
				return false;
	return true;
}

template <class C> bool is_zero_coeff(const C &c) { return c == C(); }
inline bool is_zero_coeff(const Rational &c) { return c == 0; }

template <class C> void series_normalize(SeriesT<C> &f)
{
	for (auto it = f.terms.begin(); it != f.terms.end();) {
		if (is_zero_coeff(it->second) || !in_caps(f.window, it->first))
			it = f.terms.erase(it);
		else
			++it;
	}
}

template <class C> void series_insert(SeriesT<C> &f, const Monomial &m, const C &c)
{
	if (is_zero_coeff(c) || !in_caps(f.window, m))
		return;
	auto [it, fresh] = f.terms.emplace(m, c);
	if (!fresh) {
		it->second += c;
		if (is_zero_coeff(it->second))
			f.terms.erase(it);
	}
}

/// suffix-chain window for an ordered region chain |v1| >> |v2| >> ... >> |vn|:
/// one entry per k >= 1 covering positions k..n-1
inline Window chain_window(size_t nvars)
{
	Window w;
	for (size_t k = 1; k < nvars; ++k) {
		WinEntry e;
		e.w.assign(nvars, Rational(0));
		for (size_t i = k; i < nvars; ++i)
			e.w[i] = 1;
		w.entries.push_back(e);
	}
	return w;
}

/// single-variable window (one entry of weight 1)
inline Window bi_window()
{
	Window w;
	WinEntry e;
	e.w = {Rational(1)};
	w.entries.push_back(e);
	return w;
}

/// channel window: one singleton entry per inner position k >= 1
inline Window channel_window(size_t nvars)
{
	Window w;
	for (size_t k = 1; k < nvars; ++k) {
		WinEntry e;
		e.w.assign(nvars, Rational(0));
		e.w[k] = 1;
		w.entries.push_back(e);
	}
	return w;
}

/// recompute fl/ub claims from the stored support of an exact series
template <class C> void window_tighten_exact(SeriesT<C> &f)
{
	for (auto &en : f.window.entries)
		for (int s = 0; s < 2; ++s) {
			en.cap[s] = XRat::inf();
			if (f.terms.empty()) {
				en.fl[s] = XRat::inf(); // empty: vacuously bounded
				en.ub[s] = XRat::ninf();
				continue;
			}
			bool first = true;
			Rational lo = 0, hi = 0;
			for (const auto &[m, c] : f.terms) {
				Rational v = entry_value(en, m, s);
				if (first || v < lo)
					lo = v;
				if (first || v > hi)
					hi = v;
				first = false;
			}
			en.fl[s] = XRat(lo);
			en.ub[s] = XRat(hi);
		}
}

/// an exact single-term series c * mono over the given variables
template <class C>
SeriesT<C> series_monomial(std::vector<std::string> vars, Window w, const Monomial &m,
                           const C &c, SpaceTag tag = SpaceTag::generic)
{
	SeriesT<C> f;
	f.vars = std::move(vars);
	f.window = std::move(w);
	f.tag = tag;
	if (!is_zero_coeff(c))
		f.terms.emplace(m, c);
	window_tighten_exact(f);
	return f;
}

template <class C> SeriesT<C> series_zero_like(const SeriesT<C> &f)
{
	SeriesT<C> r;
	r.vars = f.vars;
	r.window = f.window;
	r.tag = f.tag;
	return r;
}

template <class C> SeriesT<C> series_add(const SeriesT<C> &a, const SeriesT<C> &b)
{
	if (a.vars != b.vars)
		throw std::invalid_argument("series_add: variable mismatch");
	SeriesT<C> r;
	r.vars = a.vars;
	r.tag = a.tag;
	r.window = window_add(a.window, b.window);
	r.terms = a.terms;
	for (const auto &[m, c] : b.terms) {
		auto [it, fresh] = r.terms.emplace(m, c);
		if (!fresh)
			it->second += c;
	}
	series_normalize(r);
	return r;
}

template <class C> SeriesT<C> series_scale(const SeriesT<C> &a, const Rational &c)
{
	SeriesT<C> r = a;
	if (c == 0) {
		r.terms.clear();
		return r;
	}
	for (auto &[m, v] : r.terms)
		v = v * c;
	return r;
}

template <class C> SeriesT<C> series_sub(const SeriesT<C> &a, const SeriesT<C> &b)
{
	return series_add(a, series_scale(b, Rational(-1)));
}

/// Cauchy product, truncated to the exact window of the result.
/// The scalar factor may carry any coefficient type on the left.
template <class C>
SeriesT<C> series_mul(const SeriesT<Rational> &a, const SeriesT<C> &b)
{
	if (a.vars != b.vars)
		throw std::invalid_argument("series_mul: variable mismatch");
	SeriesT<C> r;
	r.vars = a.vars;
	r.tag = b.tag == SpaceTag::generic ? a.tag : b.tag;
	r.window = window_mul(a.window, b.window);

	// precompute tracked values of both supports once
	size_t ne = r.window.entries.size();
	auto tabulate = [&](const auto &terms) {
		std::vector<Rational> vals;
		vals.reserve(terms.size() * 2 * ne);
		for (const auto &[m, c] : terms)
			for (size_t e = 0; e < ne; ++e)
				for (int s = 0; s < 2; ++s)
					vals.push_back(entry_value(r.window.entries[e], m, s));
		return vals;
	};
	std::vector<Rational> va = tabulate(a.terms), vb = tabulate(b.terms);
	std::vector<bool> capped(2 * ne);
	for (size_t e = 0; e < ne; ++e)
		for (int s = 0; s < 2; ++s)
			capped[2 * e + s] = r.window.entries[e].cap[s].finite();

	size_t ia = 0;
	for (const auto &[ma, ca] : a.terms) {
		size_t ib = 0;
		for (const auto &[mb, cb] : b.terms) {
			bool ok = true;
			for (size_t k = 0; k < 2 * ne && ok; ++k)
				if (capped[k] &&
				    !(va[ia * 2 * ne + k] + vb[ib * 2 * ne + k] <=
				      r.window.entries[k / 2].cap[k % 2].v))
					ok = false;
			++ib;
			if (!ok)
				continue;
			Monomial m = mono_mul(ma, mb);
			C prod = cb * ca;
			auto [it, fresh] = r.terms.emplace(std::move(m), std::move(prod));
			if (!fresh)
				it->second += cb * ca;
		}
		++ia;
	}
	series_normalize(r);
	return r;
}

inline Series series_mul(const Series &a, const Series &b)
{
	return series_mul<Rational>(a, b);
}

/// termwise d/dv (side 0) or d/dvbar (side 1)
template <class C> SeriesT<C> derive(const SeriesT<C> &f, size_t vi, int side)
{
	SeriesT<C> r = series_zero_like(f);
	for (auto &en : r.window.entries) {
		const Rational &wv = en.w[vi];
		if (wv != 0) {
			en.fl[side] = en.fl[side] - XRat(wv);
			en.cap[side] = en.cap[side] - XRat(wv);
			en.ub[side] = en.ub[side] - XRat(wv);
		}
	}
	size_t slot = 2 * vi + side;
	for (const auto &[m, c] : f.terms) {
		if (m.e[slot] == 0)
			continue;
		Monomial mm = m;
		Rational ex = mm.e[slot];
		mm.set(slot, ex - 1);
		series_insert(r, mm, c * ex);
	}
	return r;
}

template <class C> SeriesT<C> derive(const SeriesT<C> &f, const std::string &v, int side)
{
	return derive(f, f.var_index(v), side);
}

/// lim_{v -> -v} jointly with vbar -> -vbar: multiply terms by (-1)^{r-s}
template <class C> SeriesT<C> negate_var(const SeriesT<C> &f, size_t vi)
{
	SeriesT<C> r = series_zero_like(f);
	for (const auto &[m, c] : f.terms) {
		Rational d = m.hol(vi) - m.bar(vi);
		if (!is_integer(d))
			throw std::domain_error("negate_var: conjugate exponents differ by non-integer");
		r.terms.emplace(m, parity_sign(d) > 0 ? c : c * Rational(-1));
	}
	return r;
}

/// distinct residues mod Z of the holomorphic exponents of variable vi
template <class C> std::set<Rational> exponent_classes(const SeriesT<C> &f, size_t vi = 0)
{
	std::set<Rational> out;
	for (const auto &[m, c] : f.terms) {
		Rational r = m.hol(vi);
		out.insert(r - floor_int(r));
	}
	return out;
}

/// the coefficient of v^a vbar^{a'}: a series over the remaining variables
template <class C>
SeriesT<C> coeff_extract(const SeriesT<C> &f, size_t vi, const Rational &a,
                         const Rational &abar, SpaceTag tag = SpaceTag::generic)
{
	for (const auto &en : f.window.entries)
		if (en.w[vi] != 0 && en.cap[0].finite() &&
		    !(scale_nonneg(XRat(a), en.w[vi]) <= en.cap[0] &&
		      scale_nonneg(XRat(abar), en.w[vi]) <= en.cap[1]))
			throw std::domain_error("coeff_extract: exponent outside the exactness window");
	SeriesT<C> r;
	r.tag = tag;
	for (size_t i = 0; i < f.vars.size(); ++i)
		if (i != vi)
			r.vars.push_back(f.vars[i]);
	for (const auto &en : f.window.entries) {
		WinEntry ne;
		for (size_t i = 0; i < f.vars.size(); ++i)
			if (i != vi)
				ne.w.push_back(en.w[i]);
		bool trivial = true;
		for (auto &x : ne.w)
			if (x != 0)
				trivial = false;
		if (trivial)
			continue;
		ne.fl[0] = en.fl[0] - scale_nonneg(XRat(a), en.w[vi]);
		ne.fl[1] = en.fl[1] - scale_nonneg(XRat(abar), en.w[vi]);
		ne.cap[0] = en.cap[0] - scale_nonneg(XRat(a), en.w[vi]);
		ne.cap[1] = en.cap[1] - scale_nonneg(XRat(abar), en.w[vi]);
		ne.ub[0] = en.ub[0] - scale_nonneg(XRat(a), en.w[vi]);
		ne.ub[1] = en.ub[1] - scale_nonneg(XRat(abar), en.w[vi]);
		r.window.entries.push_back(ne);
	}
	for (const auto &[m, c] : f.terms) {
		if (m.hol(vi) != a || m.bar(vi) != abar)
			continue;
		Monomial mm;
		for (size_t i = 0; i < f.vars.size(); ++i)
			if (i != vi) {
				mm.e.push_back(m.hol(i));
				mm.e.push_back(m.bar(i));
				mm.total += m.hol(i) + m.bar(i);
			}
		series_insert(r, mm, c);
	}
	return r;
}

/// sum_{k>=0} binomial(alpha, k) u^k.  Requires all tracked floors of u to be
/// non-negative and some strictly positive direction with a finite cap so the
/// powers eventually leave the window.
inline Series binom_series(const Series &u, const Rational &alpha)
{
	for (const auto &en : u.window.entries)
		for (int s = 0; s < 2; ++s)
			if (!(XRat(Rational(0)) <= en.fl[s]))
				throw std::domain_error("binom_series: factor has negative valuation");
	long kmax = -1;
	if (is_integer(alpha) && alpha >= 0)
		kmax = to_long(alpha);
	// termination: every stored term must move by a positive amount in the
	// finitely capped directions, so high powers leave the window
	bool escape = true;
	for (const auto &[m, c] : u.terms) {
		Rational step = 0;
		for (const auto &en : u.window.entries)
			for (int s = 0; s < 2; ++s)
				if (en.cap[s].finite())
					step += entry_value(en, m, s);
		if (step <= 0)
			escape = false;
	}
	if (!escape && kmax < 0)
		throw std::domain_error("binom_series: powers do not truncate");

	// caps stay those of u itself: the k=1 power is the binding one
	Series result = series_zero_like(u);
	for (auto &en : result.window.entries)
		for (int s = 0; s < 2; ++s) {
			en.fl[s] = XRat(Rational(0));
			en.ub[s] = u.terms.empty() ? XRat(Rational(0)) : XRat::inf();
		}
	Monomial one = Monomial::one(u.vars.size());
	series_insert(result, one, Rational(1));

	Series power = series_zero_like(u);
	power.window = result.window;
	series_insert(power, one, Rational(1));
	for (long k = 1; kmax < 0 || k <= kmax; ++k) {
		power = series_mul(power, u);
		power.window = result.window; // soundness per the k=1 bound above
		series_normalize(power);
		if (power.terms.empty())
			break;
		Rational b = binomial(alpha, k);
		if (b != 0)
			for (const auto &[m, c] : power.terms)
				series_insert(result, m, c * b);
	}
	series_normalize(result);
	return result;
}

struct Witness
{
	Monomial mono;
	Rational lhs, rhs;
};

/// exact comparison of coefficients on the intersection of both windows
inline std::vector<Witness> compare_on_window(const Series &a, const Series &b,
                                              size_t max_witnesses = 8)
{
	std::vector<Witness> out;
	// walk both ordered maps in lockstep
	auto ia = a.terms.begin();
	auto ib = b.terms.begin();
	auto emit = [&](const Monomial &m, const Rational &va, const Rational &vb) {
		if (va == vb)
			return;
		if (!in_caps(a.window, m) || !in_caps(b.window, m))
			return;
		if (out.size() < max_witnesses)
			out.push_back({m, va, vb});
	};
	while (ia != a.terms.end() || ib != b.terms.end()) {
		if (out.size() >= max_witnesses)
			break;
		if (ib == b.terms.end() || (ia != a.terms.end() && ia->first < ib->first)) {
			emit(ia->first, ia->second, Rational(0));
			++ia;
		} else if (ia == a.terms.end() || ib->first < ia->first) {
			emit(ib->first, Rational(0), ib->second);
			++ib;
		} else {
			emit(ia->first, ia->second, ib->second);
			++ia;
			++ib;
		}
	}
	return out;
}

/// number of monomials of a that survive b's caps and vice versa; used to
/// detect vacuous comparisons
inline size_t comparable_support(const Series &a, const Series &b)
{
	size_t n = 0;
	for (const auto &[m, c] : a.terms)
		if (in_caps(b.window, m))
			++n;
	for (const auto &[m, c] : b.terms)
		if (in_caps(a.window, m))
			++n;
	return n;
}

inline std::string format_monomial(const SeriesT<Rational> &f, const Monomial &m)
{
	std::ostringstream os;
	bool first = true;
	for (size_t i = 0; i < f.vars.size(); ++i) {
		if (m.hol(i) != 0) {
			os << (first ? "" : " ") << f.vars[i] << "^" << format_rational(m.hol(i));
			first = false;
		}
		if (m.bar(i) != 0) {
			os << (first ? "" : " ") << f.vars[i] << "bar^" << format_rational(m.bar(i));
			first = false;
		}
	}
	return os.str();
}

/// canonical text form: one term per line, keys in canonical order
inline std::string series_to_text(const Series &f)
{
	std::ostringstream os;
	for (const auto &[m, c] : f.terms) {
		os << format_rational(c) << " *";
		std::string mono = format_monomial(f, m);
		if (!mono.empty())
			os << " " << mono;
		os << "\n";
	}
	return os.str();
}

} // namespace fva
