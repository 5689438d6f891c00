#pragma once

#include "fva/rational.hpp"
#include <algorithm>
#include <cassert>
#include <vector>

namespace fva {

/// Rational extended with +/-infinity, used for window bounds.
struct XRat
{
	int8_t kind = 0; // -1 = -inf, 0 = finite, +1 = +inf
	Rational v = 0;

	XRat() = default;
	XRat(const Rational &q) : kind(0), v(q) {}
	XRat(int q) : kind(0), v(q) {}
	static XRat inf() { return XRat(int8_t(1)); }
	static XRat ninf() { return XRat(int8_t(-1)); }

	bool finite() const { return kind == 0; }
	bool is_inf() const { return kind > 0; }
	bool is_ninf() const { return kind < 0; }

  private:
	explicit XRat(int8_t k) : kind(k) {}
};

inline bool operator==(const XRat &a, const XRat &b)
{
	if (a.kind != b.kind)
		return false;
	return a.kind != 0 || a.v == b.v;
}

inline bool operator<(const XRat &a, const XRat &b)
{
	if (a.kind != b.kind)
		return a.kind < b.kind;
	return a.kind == 0 && a.v < b.v;
}
inline bool operator<=(const XRat &a, const XRat &b) { return a < b || a == b; }
inline bool operator<(const Rational &a, const XRat &b) { return XRat(a) < b; }
inline bool operator<=(const Rational &a, const XRat &b) { return XRat(a) <= b; }
inline bool operator<(const XRat &a, const Rational &b) { return a < XRat(b); }
inline bool operator<=(const XRat &a, const Rational &b) { return a <= XRat(b); }

/// a + b; -inf + +inf is a program error
inline XRat operator+(const XRat &a, const XRat &b)
{
	if (a.finite() && b.finite())
		return XRat(a.v + b.v);
	if (a.is_inf() || b.is_inf()) {
		assert(!a.is_ninf() && !b.is_ninf());
		return XRat::inf();
	}
	return XRat::ninf();
}

inline XRat operator-(const XRat &a)
{
	XRat r = a;
	r.kind = -r.kind;
	r.v = -r.v;
	return r;
}
inline XRat operator-(const XRat &a, const XRat &b) { return a + (-b); }

inline XRat xmin(const XRat &a, const XRat &b) { return a < b ? a : b; }
inline XRat xmax(const XRat &a, const XRat &b) { return a < b ? b : a; }

/// scale by a non-negative rational; 0 * inf = 0
inline XRat scale_nonneg(const XRat &a, const Rational &c)
{
	assert(c >= 0);
	if (c == 0)
		return XRat(Rational(0));
	if (!a.finite())
		return a;
	return XRat(a.v * c);
}

/// One tracked linear functional of a series' exponent vectors, with the
/// bounds known for it.  The functional applies separately to the
/// holomorphic exponents (side 0) and antiholomorphic exponents (side 1).
///
///   fl : every monomial of the (untruncated) series has value >= fl
///   ub : every monomial of the (untruncated) series has value <= ub
///   cap: within the region where all entries' values are <= cap, the stored
///        terms coincide exactly with the untruncated series
struct WinEntry
{
	std::vector<Rational> w; // weight per variable pair
	XRat fl[2] = {XRat::ninf(), XRat::ninf()};
	XRat cap[2] = {XRat::inf(), XRat::inf()};
	XRat ub[2] = {XRat::inf(), XRat::inf()};

	bool exact(int side) const { return ub[side] <= cap[side]; }
};

struct Window
{
	std::vector<WinEntry> entries;

	bool compatible(const Window &o) const
	{
		if (entries.size() != o.entries.size())
			return false;
		for (size_t i = 0; i < entries.size(); ++i)
			if (entries[i].w != o.entries[i].w)
				return false;
		return true;
	}
};

/// window of a sum of two series
inline Window window_add(const Window &a, const Window &b)
{
	assert(a.compatible(b));
	Window r = a;
	for (size_t i = 0; i < r.entries.size(); ++i)
		for (int s = 0; s < 2; ++s) {
			r.entries[i].fl[s] = xmin(a.entries[i].fl[s], b.entries[i].fl[s]);
			r.entries[i].cap[s] = xmin(a.entries[i].cap[s], b.entries[i].cap[s]);
			r.entries[i].ub[s] = xmax(a.entries[i].ub[s], b.entries[i].ub[s]);
		}
	return r;
}

/// window of a product of two series.  An exact factor (ub <= cap) does not
/// limit the cap; otherwise the other factor's floor shifts it.
inline Window window_mul(const Window &a, const Window &b)
{
	assert(a.compatible(b));
	Window r = a;
	for (size_t i = 0; i < r.entries.size(); ++i)
		for (int s = 0; s < 2; ++s) {
			const WinEntry &ea = a.entries[i], &eb = b.entries[i];
			r.entries[i].fl[s] = ea.fl[s] + eb.fl[s];
			r.entries[i].ub[s] = ea.ub[s] + eb.ub[s];
			XRat lim = XRat::inf();
			if (!ea.exact(s))
				lim = xmin(lim, ea.cap[s] + eb.fl[s]);
			if (!eb.exact(s))
				lim = xmin(lim, eb.cap[s] + ea.fl[s]);
			r.entries[i].cap[s] = lim;
		}
	return r;
}

/// clamp all caps to a requested bound (same for both sides)
inline Window window_clamp(const Window &w, const XRat &cap)
{
	Window r = w;
	for (auto &e : r.entries)
		for (int s = 0; s < 2; ++s)
			e.cap[s] = xmin(e.cap[s], cap);
	return r;
}

} // namespace fva
