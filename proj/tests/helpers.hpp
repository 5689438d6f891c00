#pragma once

#include "fva/compose.hpp"
#include "fva/series.hpp"
#include <random>

namespace fva::testing {

inline Monomial mono(std::initializer_list<Rational> exps)
{
	Monomial m;
	for (const auto &x : exps) {
		m.e.push_back(x);
		m.total += x;
	}
	return m;
}

/// BiSeries in one variable pair with the given cap, empty
inline Series make_bi(const std::string &var, const Rational &floor,
                      const Rational &cap)
{
	Series f;
	f.vars = {var};
	f.tag = SpaceTag::bi;
	f.window = bi_window();
	for (int s = 0; s < 2; ++s) {
		f.window.entries[0].fl[s] = XRat(floor);
		f.window.entries[0].cap[s] = XRat(cap);
	}
	return f;
}

/// chain-region series over the given variables, all suffix caps equal
inline Series make_chain(std::vector<std::string> vars, const Rational &cap,
                         SpaceTag tag = SpaceTag::chain)
{
	Series f;
	f.vars = std::move(vars);
	f.tag = tag;
	f.window = chain_window(f.vars.size());
	for (auto &en : f.window.entries)
		for (int s = 0; s < 2; ++s) {
			en.fl[s] = XRat::ninf();
			en.cap[s] = XRat(cap);
		}
	return f;
}

inline void set_floor(Series &f, const Rational &floor)
{
	for (auto &en : f.window.entries)
		for (int s = 0; s < 2; ++s)
			en.fl[s] = XRat(floor);
}

/// deterministic random BiSeries with exponent classes from `classes`,
/// exponents in [lo, cap], conjugate differences in [-spin, spin]
inline Series random_bi(std::mt19937_64 &rng, const std::string &var,
                        const std::vector<Rational> &classes, int lo, int cap,
                        int spin = 2, int nterms = 6)
{
	Series f = make_bi(var, Rational(lo) - 1, Rational(cap));
	std::uniform_int_distribution<int> cls(0, int(classes.size()) - 1);
	std::uniform_int_distribution<int> expo(lo, cap - 1);
	std::uniform_int_distribution<int> sp(-spin, spin);
	std::uniform_int_distribution<int> num(-9, 9);
	std::uniform_int_distribution<int> den(1, 4);
	for (int i = 0; i < nterms; ++i) {
		Rational r = classes[cls(rng)] + expo(rng);
		Rational s = r + sp(rng);
		if (!(s <= Rational(cap)) || s < Rational(lo) - 1)
			continue;
		Rational c(num(rng), den(rng));
		if (c == 0)
			continue;
		series_insert(f, mono({r, s}), c);
	}
	return f;
}

} // namespace fva::testing
