#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace fva {

using BigInt = boost::multiprecision::cpp_int;
using Rational =
    boost::multiprecision::number<boost::multiprecision::rational_adaptor<
                                      boost::multiprecision::cpp_int_backend<>>,
                                  boost::multiprecision::et_off>;

inline bool is_integer(const Rational &q) { return denominator(q) == 1; }

inline long to_long(const Rational &q)
{
	if (!is_integer(q))
		throw std::invalid_argument("to_long: not an integer: " + q.str());
	return static_cast<long>(numerator(q));
}

/// floor of a rational as a BigInt
inline BigInt floor_int(const Rational &q)
{
	BigInt n = numerator(q), d = denominator(q);
	BigInt f = n / d;
	if (n < 0 && f * d != n)
		f -= 1;
	return f;
}

inline bool is_even_integer(const Rational &q)
{
	return is_integer(q) && numerator(q) % 2 == 0;
}

/// (-1)^k for an integer-valued rational k
inline int parity_sign(const Rational &k)
{
	if (!is_integer(k))
		throw std::invalid_argument("parity_sign: not an integer: " + k.str());
	return numerator(k) % 2 == 0 ? 1 : -1;
}

inline Rational pow_int(const Rational &a, long e)
{
	if (e < 0) {
		if (a == 0)
			throw std::domain_error("pow_int: 0^negative");
		return Rational(1) / pow_int(a, -e);
	}
	Rational r = 1, b = a;
	while (e) {
		if (e & 1)
			r *= b;
		b *= b;
		e >>= 1;
	}
	return r;
}

/// generalized binomial coefficient binom(a, k) = a(a-1)...(a-k+1)/k!
inline Rational binomial(const Rational &a, long k)
{
	if (k < 0)
		return 0;
	Rational r = 1;
	for (long i = 0; i < k; ++i) {
		r *= (a - i);
		r /= (i + 1);
	}
	return r;
}

inline Rational factorial(long n)
{
	Rational r = 1;
	for (long i = 2; i <= n; ++i)
		r *= i;
	return r;
}

/// exact k-th root of a non-negative integer, if one exists
inline std::optional<BigInt> exact_root(const BigInt &n, unsigned k)
{
	if (n < 0)
		return std::nullopt;
	if (n == 0 || n == 1 || k == 1)
		return n;
	BigInt lo = 0, hi = n;
	while (lo < hi) {
		BigInt mid = (lo + hi + 1) / 2;
		BigInt p = 1;
		bool over = false;
		for (unsigned i = 0; i < k; ++i) {
			p *= mid;
			if (p > n) {
				over = true;
				break;
			}
		}
		if (over)
			hi = mid - 1;
		else
			lo = mid;
	}
	BigInt p = 1;
	for (unsigned i = 0; i < k; ++i)
		p *= lo;
	if (p == n)
		return lo;
	return std::nullopt;
}

/// exact rational power a^e, when it exists as a rational
inline std::optional<Rational> rational_pow(const Rational &a, const Rational &e)
{
	if (is_integer(e)) {
		long k = to_long(e);
		if (a == 0 && k <= 0)
			return std::nullopt;
		if (a == 0)
			return Rational(0);
		return pow_int(a, k);
	}
	if (a == 0)
		return Rational(0);
	if (a < 0)
		return std::nullopt;
	unsigned k = static_cast<unsigned>(denominator(e));
	auto rn = exact_root(numerator(a), k);
	auto rd = exact_root(denominator(a), k);
	if (!rn || !rd)
		return std::nullopt;
	Rational root(*rn, *rd);
	return pow_int(root, static_cast<long>(numerator(e)));
}

inline std::string format_rational(const Rational &q)
{
	if (is_integer(q))
		return numerator(q).str();
	return numerator(q).str() + "/" + denominator(q).str();
}

inline Rational parse_rational(const std::string &s)
{
	auto pos = s.find('/');
	try {
		if (pos == std::string::npos)
			return Rational(BigInt(s));
		BigInt n(s.substr(0, pos)), d(s.substr(pos + 1));
		if (d == 0)
			throw std::invalid_argument("zero denominator");
		return Rational(n, d);
	} catch (const std::exception &) {
		throw std::invalid_argument("parse_rational: bad rational '" + s + "'");
	}
}

} // namespace fva
