#pragma once

#include "fva/series.hpp"

namespace fva {

/// swap holomorphic and antiholomorphic data (formal conjugate; coefficients
/// are rational and stay fixed)
template <class C> SeriesT<C> conjugate_series(const SeriesT<C> &f)
{
	SeriesT<C> r = series_zero_like(f);
	for (auto &en : r.window.entries) {
		std::swap(en.fl[0], en.fl[1]);
		std::swap(en.cap[0], en.cap[1]);
		std::swap(en.ub[0], en.ub[1]);
	}
	for (const auto &[m, c] : f.terms) {
		Monomial mm = m;
		for (size_t i = 0; i + 1 < mm.e.size(); i += 2) {
			std::swap(mm.e[i], mm.e[i + 1]);
			if (mm.fast())
				std::swap(mm.fp[i], mm.fp[i + 1]);
		}
		r.terms.emplace(mm, c);
	}
	return r;
}

/// reinterpret f over a larger variable list; old variable i becomes
/// position where[i].  New positions get exponent 0.  Window entries keep
/// their bounds; callers add entries for the new directions themselves.
template <class C>
SeriesT<C> extend_vars(const SeriesT<C> &f, std::vector<std::string> new_vars,
                       const std::vector<size_t> &where)
{
	SeriesT<C> r;
	r.tag = f.tag;
	r.vars = std::move(new_vars);
	r.window.entries.reserve(f.window.entries.size());
	for (const auto &en : f.window.entries) {
		WinEntry ne = en;
		ne.w.assign(r.vars.size(), Rational(0));
		for (size_t i = 0; i < f.vars.size(); ++i)
			ne.w[where[i]] = en.w[i];
		r.window.entries.push_back(ne);
	}
	for (const auto &[m, c] : f.terms) {
		Monomial mm = Monomial::one(r.vars.size());
		for (size_t i = 0; i < f.vars.size(); ++i) {
			mm.set(2 * where[i], m.hol(i));
			mm.set(2 * where[i] + 1, m.bar(i));
		}
		r.terms.emplace(mm, c);
	}
	return r;
}

template <class C>
SeriesT<C> rename_vars(const SeriesT<C> &f, std::vector<std::string> new_names)
{
	if (new_names.size() != f.vars.size())
		throw std::invalid_argument("rename_vars: arity mismatch");
	SeriesT<C> r = f;
	r.vars = std::move(new_names);
	return r;
}

/// dominant-monomial decomposition  f = c * m * (1 + w):  m is the unique
/// stored term attaining every tracked floor, w has non-negative valuation
/// in every tracked direction
struct DominantSplit
{
	Rational lead; // c
	Monomial mono; // m
	Series unit;   // w
};

inline DominantSplit dominant_split(const Series &inner)
{
	if (inner.terms.empty())
		throw std::domain_error("substitute: inner series is zero");
	const Monomial *dom = nullptr;
	for (const auto &[m, c] : inner.terms) {
		bool all = true;
		for (const auto &en : inner.window.entries)
			for (int s = 0; s < 2 && all; ++s) {
				if (!en.fl[s].finite() || entry_value(en, m, s) != en.fl[s].v)
					all = false;
			}
		if (all) {
			if (dom)
				throw std::domain_error("substitute: inner series has no unique "
				                        "dominant monomial");
			dom = &m;
		}
	}
	if (!dom)
		throw std::domain_error(
		    "substitute: inner series not of the form c*m*(1+w)");
	DominantSplit d;
	d.mono = *dom;
	d.lead = inner.terms.at(*dom);
	d.unit = series_zero_like(inner);
	for (auto &en : d.unit.window.entries)
		for (int s = 0; s < 2; ++s) {
			en.cap[s] = en.cap[s] - en.fl[s];
			en.fl[s] = XRat(Rational(0));
			en.ub[s] = XRat::inf();
		}
	Monomial one = Monomial::one(inner.vars.size());
	for (const auto &[m, c] : inner.terms) {
		Monomial mm = m;
		for (size_t i = 0; i < mm.e.size(); ++i)
			mm.add(i, -d.mono.e[i]);
		Rational cc = c / d.lead;
		if (mm == one)
			cc -= 1;
		if (cc != 0)
			d.unit.terms.emplace(mm, cc);
	}
	return d;
}

/// Reusable substitution state: the dominant split and the powers of the
/// unit part are shared across many outer series (the expensive part of
/// s_A-style substitutions).
struct SubstitutionKernel
{
	Series inner;            // holomorphic-pure image of the variable
	DominantSplit ds;
	Rational lead_bar;
	std::vector<Rational> ev; // dominant valuation per tracked entry
	std::vector<Series> pw;   // powers of the unit part

	Series apply(const Series &outer, const XRat &clamp = XRat::inf()) const;
};

inline SubstitutionKernel make_substitution_kernel(const Series &inner_in)
{
	SubstitutionKernel K;
	K.inner = inner_in;
	for (const auto &[m, c] : K.inner.terms)
		for (size_t i = 0; i < K.inner.vars.size(); ++i)
			if (m.bar(i) != 0)
				throw std::invalid_argument(
				    "substitute_pair: inner must be holomorphic-pure");
	for (auto &en : K.inner.window.entries) {
		en.fl[1] = XRat(Rational(0));
		en.ub[1] = XRat(Rational(0));
		en.cap[1] = XRat::inf();
	}
	K.ds = dominant_split(K.inner);
	K.lead_bar = dominant_split(conjugate_series(K.inner)).lead;

	size_t ne = K.inner.window.entries.size();
	K.ev.resize(ne);
	for (size_t k = 0; k < ne; ++k) {
		K.ev[k] = entry_value(K.inner.window.entries[k], K.ds.mono, 0);
		if (K.ev[k] < 0)
			throw std::domain_error("substitute: inner valuation negative in a "
			                        "tracked direction");
	}

	// powers of the unit part; the escape condition mirrors binom_series
	for (const auto &[m, c] : K.ds.unit.terms) {
		Rational step = 0;
		for (const auto &en : K.ds.unit.window.entries)
			for (int s = 0; s < 2; ++s)
				if (en.cap[s].finite())
					step += entry_value(en, m, s);
		if (step <= 0)
			throw std::domain_error("substitute: unit powers do not truncate");
	}
	K.pw.push_back(series_monomial<Rational>(K.inner.vars, K.ds.unit.window,
	                                         Monomial::one(K.inner.vars.size()),
	                                         Rational(1)));
	while (true) {
		Series nxt = series_mul(K.pw.back(), K.ds.unit);
		nxt.window = K.ds.unit.window;
		series_normalize(nxt);
		if (nxt.terms.empty())
			break;
		K.pw.push_back(std::move(nxt));
	}
	return K;
}

inline Series SubstitutionKernel::apply(const Series &outer,
                                        const XRat &clamp) const
{
	if (outer.vars.size() != 1)
		throw std::invalid_argument("substitute_pair: outer must be univariate");
	const WinEntry &oe = outer.window.entries.at(0);
	size_t ne = inner.window.entries.size();
	bool positive = false;
	for (size_t k = 0; k < ne; ++k)
		positive = positive || ev[k] > 0;
	bool trivial_outer =
	    outer.terms.size() <= 1 && oe.exact(0) && oe.exact(1);
	if (!trivial_outer && !positive)
		throw std::domain_error("substitute: inner series has no strictly "
		                        "positive leading valuation");

	// sound result window, independent of which outer terms are present:
	// generated side-0 values are r*ev + (w part >= 0), side 1 mirrored with s
	Series acc;
	acc.vars = inner.vars;
	acc.tag = inner.tag;
	acc.window = inner.window;
	for (size_t k = 0; k < ne; ++k) {
		WinEntry &en = acc.window.entries[k];
		const WinEntry &wi = inner.window.entries[k];
		XRat wslack = wi.cap[0] - wi.fl[0];
		for (int side = 0; side < 2; ++side) {
			XRat lo = scale_nonneg(oe.fl[side], ev[k]);
			XRat capA = lo + wslack;
			XRat capB = XRat::inf();
			if (!oe.exact(side) && ev[k] > 0)
				capB = scale_nonneg(oe.cap[side], ev[k]);
			en.fl[side] = lo;
			en.ub[side] = XRat::inf();
			en.cap[side] = xmin(xmin(capA, capB), clamp);
		}
	}

	// m^t * (1+w)^t clipped against the larger of the two side caps (this
	// serves both the holomorphic role at t = r and, conjugated, the
	// antiholomorphic role at t = s)
	std::vector<XRat> capm;
	for (const auto &en : acc.window.entries)
		capm.push_back(xmax(en.cap[0], en.cap[1]));
	auto hol_part = [&](const Rational &t) {
		Series h;
		h.vars = inner.vars;
		h.window = acc.window;
		Monomial shift = Monomial::one(inner.vars.size());
		for (size_t i = 0; i < inner.vars.size(); ++i)
			shift.set(2 * i, ds.mono.hol(i) * t);
		for (size_t k = 0; k < pw.size(); ++k) {
			Rational b = binomial(t, long(k));
			if (is_integer(t) && t >= 0 && long(k) > to_long(t))
				break;
			if (b == 0)
				continue;
			for (const auto &[m, c] : pw[k].terms) {
				Monomial mm = mono_mul(shift, m);
				bool ok = true;
				for (size_t e = 0; e < h.window.entries.size(); ++e)
					if (!(entry_value(h.window.entries[e], mm, 0) <= capm[e]))
						ok = false;
				if (!ok)
					continue;
				// side-1 is clipped only after tensoring with the bar part
				auto [it, fresh] = h.terms.emplace(mm, c * b);
				if (!fresh) {
					it->second += c * b;
					if (it->second == 0)
						h.terms.erase(it);
				}
			}
		}
		return h;
	};

	std::map<Rational, Series> hol_cache;
	auto hol_of = [&](const Rational &t) -> const Series & {
		auto it = hol_cache.find(t);
		if (it == hol_cache.end())
			it = hol_cache.emplace(t, hol_part(t)).first;
		return it->second;
	};

	// group outer terms by r; combine the conjugate parts per group first
	std::map<Rational, std::vector<std::pair<Rational, Rational>>> groups;
	for (const auto &[mo, co] : outer.terms) {
		const Rational &r = mo.hol(0), &s = mo.bar(0);
		if (!is_integer(r - s))
			throw std::domain_error("substitute: outer violates r-s in Z");
		Rational mult = pow_int(ds.lead, to_long(r - s));
		auto sq = rational_pow(ds.lead * lead_bar, s);
		if (!sq)
			throw std::domain_error(
			    "substitute: leading coefficient power not rational");
		groups[r].push_back({s, co * mult * *sq});
	}
	for (const auto &[r, ss] : groups) {
		std::map<Monomial, Rational> bar;
		for (const auto &[s, c] : ss)
			for (const auto &[m, cm] : conjugate_series(hol_of(s)).terms) {
				bool ok = true;
				for (const auto &en : acc.window.entries)
					if (!(entry_value(en, m, 1) <= en.cap[1]))
						ok = false;
				if (!ok)
					continue;
				auto [it, fresh] = bar.emplace(m, cm * c);
				if (!fresh) {
					it->second += cm * c;
					if (it->second == 0)
						bar.erase(it);
				}
			}
		// prefilter each side by its own caps: a tensor pair then satisfies
		// the full window automatically (the supports live on disjoint sides)
		for (const auto &[mh, ch] : hol_of(r).terms) {
			bool ok = true;
			for (const auto &en : acc.window.entries)
				if (!(entry_value(en, mh, 0) <= en.cap[0]))
					ok = false;
			if (!ok)
				continue;
			for (const auto &[mb, cb] : bar) {
				Rational prod = ch * cb;
				if (prod == 0)
					continue;
				auto [it, fresh] = acc.terms.emplace(mono_mul(mh, mb), prod);
				if (!fresh) {
					it->second += prod;
					if (it->second == 0)
						acc.terms.erase(it);
				}
			}
		}
	}
	series_normalize(acc);
	return acc;
}

/// Substitute the pair (inner, conj inner) for the single variable of
/// `outer`:  p^r pbar^s -> inner^r * conj(inner)^s, truncated to the largest
/// window on which the composition is exact.  `inner` is the image of the
/// holomorphic variable and must be free of barred exponents; the image of
/// the conjugate variable is its formal conjugate.
inline Series substitute_pair(const Series &outer, const Series &inner)
{
	return make_substitution_kernel(inner).apply(outer);
}

/// exp(c * v * sum_{w in ws} d/dw) * exp(c * vbar * sum d/dwbar) applied
/// termwise; the substitution w -> w + c*v on the region.  Well-defined only
/// when v sits at least as deep as every w in all tracked directions and some
/// finite cap truncates the generated v-powers.
template <class C>
SeriesT<C> exp_derivation(const SeriesT<C> &f, const Rational &c, size_t v,
                          const std::vector<size_t> &ws)
{
	for (size_t w : ws) {
		if (w == v)
			throw std::invalid_argument("exp_derivation: v in target set");
		for (const auto &en : f.window.entries)
			if (en.w[v] < en.w[w])
				throw std::domain_error("exp_derivation: not well-defined (change "
				                        "of variables escapes the region)");
	}

	SeriesT<C> r = series_zero_like(f);
	for (auto &en : r.window.entries) {
		bool moves = false;
		for (size_t w : ws)
			if (en.w[v] != en.w[w])
				moves = true;
		if (moves)
			en.ub[0] = en.ub[1] = XRat::inf();
	}

	struct Item
	{
		Monomial m;
		Rational coeff;
	};
	auto apply_one = [&](std::vector<Item> items, int side, size_t w) {
		std::vector<Item> out;
		for (const auto &it : items) {
			Rational a = it.m.e[2 * w + side];
			long kmax = -1; // -1: unbounded, rely on the binomial dying
			for (const auto &en : r.window.entries) {
				Rational delta = en.w[v] - en.w[w];
				if (delta > 0 && en.cap[side].finite()) {
					Rational room =
					    (en.cap[side].v - entry_value(en, it.m, side)) / delta;
					long lim = room < 0 ? -1 : static_cast<long>(floor_int(room));
					if (kmax < 0 || lim < kmax)
						kmax = lim;
				}
			}
			if (kmax < 0 && !(is_integer(a) && a >= 0))
				throw std::domain_error("exp_derivation: no truncating direction");
			Monomial mono = it.m;
			Rational coef = it.coeff;
			out.push_back(it);
			for (long k = 1; kmax < 0 || k <= kmax; ++k) {
				coef *= c * (a - (k - 1));
				coef /= k;
				if (coef == 0)
					break;
				mono.add(2 * w + side, Rational(-1));
				mono.add(2 * v + side, Rational(1));
				out.push_back({mono, coef});
			}
		}
		return out;
	};

	for (const auto &[m0, c0] : f.terms) {
		std::vector<Item> items{{m0, Rational(1)}};
		for (size_t w : ws)
			items = apply_one(std::move(items), 0, w);
		for (size_t w : ws)
			items = apply_one(std::move(items), 1, w);
		for (const auto &it : items)
			series_insert(r, it.m, c0 * it.coeff);
	}
	series_normalize(r);
	return r;
}

} // namespace fva
