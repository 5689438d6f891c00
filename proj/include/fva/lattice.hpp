#pragma once

#include "fva/rational.hpp"
#include <vector>

namespace fva {

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

inline RatMat rat_mat(size_t n, size_t m)
{
	return RatMat(n, RatVec(m, Rational(0)));
}

inline RatMat mat_mul(const RatMat &a, const RatMat &b)
{
	size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
	RatMat r = rat_mat(n, m);
	for (size_t i = 0; i < n; ++i)
		for (size_t l = 0; l < k; ++l) {
			if (a[i][l] == 0)
				continue;
			for (size_t j = 0; j < m; ++j)
				r[i][j] += a[i][l] * b[l][j];
		}
	return r;
}

inline RatMat mat_sub(const RatMat &a, const RatMat &b)
{
	RatMat r = a;
	for (size_t i = 0; i < r.size(); ++i)
		for (size_t j = 0; j < r[i].size(); ++j)
			r[i][j] -= b[i][j];
	return r;
}

inline RatMat mat_transpose(const RatMat &a)
{
	size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
	RatMat r = rat_mat(m, n);
	for (size_t i = 0; i < n; ++i)
		for (size_t j = 0; j < m; ++j)
			r[j][i] = a[i][j];
	return r;
}

inline RatMat mat_identity(size_t n)
{
	RatMat r = rat_mat(n, n);
	for (size_t i = 0; i < n; ++i)
		r[i][i] = 1;
	return r;
}

inline Rational mat_det(RatMat a)
{
	size_t n = a.size();
	Rational det = 1;
	for (size_t c = 0; c < n; ++c) {
		size_t piv = c;
		while (piv < n && a[piv][c] == 0)
			++piv;
		if (piv == n)
			return 0;
		if (piv != c) {
			std::swap(a[piv], a[c]);
			det = -det;
		}
		det *= a[c][c];
		for (size_t r = c + 1; r < n; ++r) {
			if (a[r][c] == 0)
				continue;
			Rational f = a[r][c] / a[c][c];
			for (size_t j = c; j < n; ++j)
				a[r][j] -= f * a[c][j];
		}
	}
	return det;
}

/// a basis of the column space, as vectors
inline std::vector<RatVec> column_space_basis(const RatMat &a)
{
	size_t n = a.size();
	std::vector<RatVec> rows = mat_transpose(a); // rows = columns of a
	std::vector<RatVec> basis;
	// gaussian elimination, keeping the original vector of each new pivot
	std::vector<RatVec> reduced;
	for (size_t i = 0; i < rows.size(); ++i) {
		RatVec v = rows[i];
		for (const auto &r : reduced) {
			size_t p = 0;
			while (p < n && r[p] == 0)
				++p;
			if (p < n && v[p] != 0) {
				Rational f = v[p] / r[p];
				for (size_t j = 0; j < n; ++j)
					v[j] -= f * r[j];
			}
		}
		bool zero = true;
		for (const auto &x : v)
			if (x != 0)
				zero = false;
		if (!zero) {
			reduced.push_back(v);
			basis.push_back(rows[i]);
		}
	}
	return basis;
}

struct EvenLattice
{
	int rank = 0;
	std::vector<std::vector<long>> gram;

	RatMat gram_rational() const
	{
		RatMat g = rat_mat(size_t(rank), size_t(rank));
		for (size_t i = 0; i < size_t(rank); ++i)
			for (size_t j = 0; j < size_t(rank); ++j)
				g[i][j] = gram[i][j];
		return g;
	}
};

inline void validate_lattice(const EvenLattice &L)
{
	if (L.rank <= 0 || L.gram.size() != size_t(L.rank))
		throw std::invalid_argument("lattice: bad rank");
	for (size_t i = 0; i < size_t(L.rank); ++i) {
		if (L.gram[i].size() != size_t(L.rank))
			throw std::invalid_argument("lattice: gram not square");
		for (size_t j = 0; j < size_t(L.rank); ++j)
			if (L.gram[i][j] != L.gram[j][i])
				throw std::invalid_argument("lattice: gram not symmetric");
		if (L.gram[i][i] % 2 != 0)
			throw std::invalid_argument("lattice: not even");
	}
	if (mat_det(L.gram_rational()) == 0)
		throw std::invalid_argument("lattice: degenerate gram matrix");
}

/// the standard two-cocycle sign table: eps(b_i, b_j) = 1 for i <= j and
/// (-1)^{(b_i,b_j)} for i > j, extended bimultiplicatively
struct TwistedGroupAlgebra
{
	EvenLattice lattice;
	// eps_table[i][j] in {0,1}: the exponent of -1 on basis pairs
	std::vector<std::vector<int>> eps_table;

	static TwistedGroupAlgebra standard(const EvenLattice &L)
	{
		TwistedGroupAlgebra A;
		A.lattice = L;
		size_t n = size_t(L.rank);
		A.eps_table.assign(n, std::vector<int>(n, 0));
		for (size_t i = 0; i < n; ++i)
			for (size_t j = 0; j < n; ++j)
				if (i > j)
					A.eps_table[i][j] = int(((L.gram[i][j] % 2) + 2) % 2);
		return A;
	}

	/// the sign eps(alpha, beta) = +-1
	int cocycle(const std::vector<long> &alpha, const std::vector<long> &beta) const
	{
		long s = 0;
		size_t n = eps_table.size();
		for (size_t i = 0; i < n; ++i) {
			if (alpha[i] == 0)
				continue;
			for (size_t j = 0; j < n; ++j)
				if (eps_table[i][j] && beta[j] % 2 != 0 && alpha[i] % 2 != 0)
					++s;
		}
		return s % 2 == 0 ? 1 : -1;
	}
};

struct Projection
{
	RatMat p;
};

/// the lattice full vertex operator algebra's ambient data: lattice, cocycle,
/// projection, the (-,-)_p form and rational orthogonal frames of H_l, H_r
struct LatticeFVA
{
	TwistedGroupAlgebra algebra;
	RatMat p;
	bool positive_mode = false;
	RatMat G;   // lattice gram over Q
	RatMat Gp;  // the (-,-)_p form
	// orthogonal frames: frame[i] is a rational vector in lattice coordinates;
	// indices [0, dim_l) span H_l, [dim_l, rank) span H_r
	std::vector<RatVec> frame;
	std::vector<Rational> frame_norm; // (u_i, u_i)_p
	size_t dim_l = 0;

	size_t rank() const { return frame.size(); }
	size_t dim_r() const { return frame.size() - dim_l; }
	bool is_left(size_t i) const { return i < dim_l; }

	Rational pairing(const RatVec &a, const RatVec &b) const
	{
		Rational r = 0;
		for (size_t i = 0; i < a.size(); ++i) {
			if (a[i] == 0)
				continue;
			for (size_t j = 0; j < b.size(); ++j)
				if (b[j] != 0)
					r += a[i] * Gp[i][j] * b[j];
		}
		return r;
	}

	Rational pairing_lattice(const RatVec &a, const std::vector<long> &beta) const
	{
		RatVec b(beta.size());
		for (size_t i = 0; i < beta.size(); ++i)
			b[i] = beta[i];
		return pairing(a, b);
	}

	/// (p alpha, p beta)_p for lattice vectors: the holomorphic weight pairing
	Rational left_pairing(const std::vector<long> &a, const std::vector<long> &b) const
	{
		return chiral_pairing(a, b, true);
	}
	Rational right_pairing(const std::vector<long> &a, const std::vector<long> &b) const
	{
		return chiral_pairing(a, b, false);
	}

	Rational chiral_pairing(const std::vector<long> &a, const std::vector<long> &b,
	                        bool left) const
	{
		// (p a, p b)_p = (p a, p b); project and pair with G
		RatVec pa = project(a, left), pb = project(b, left);
		Rational r = 0;
		for (size_t i = 0; i < pa.size(); ++i) {
			if (pa[i] == 0)
				continue;
			for (size_t j = 0; j < pb.size(); ++j)
				if (pb[j] != 0)
					r += pa[i] * G[i][j] * pb[j];
		}
		return left ? r : -r;
	}

	RatVec project(const std::vector<long> &a, bool left) const
	{
		size_t n = rank();
		RatVec r(n, Rational(0));
		for (size_t i = 0; i < n; ++i)
			for (size_t j = 0; j < n; ++j) {
				Rational pij = left ? p[i][j] : (i == j ? Rational(1) : Rational(0)) - p[i][j];
				r[i] += pij * Rational(a[j]);
			}
		return r;
	}

	/// frame coordinates of an ambient rational vector under (-,-)_p
	RatVec frame_coords(const RatVec &h) const
	{
		RatVec c(rank());
		for (size_t i = 0; i < rank(); ++i)
			c[i] = pairing(h, frame[i]) / frame_norm[i];
		return c;
	}
};

inline LatticeFVA make_lattice_fva(const EvenLattice &L, const Projection &proj,
                                   bool positive_mode,
                                   const TwistedGroupAlgebra *algebra = nullptr)
{
	validate_lattice(L);
	size_t n = size_t(L.rank);
	const RatMat &p = proj.p;
	if (p.size() != n)
		throw std::invalid_argument("projection: wrong size");
	for (const auto &row : p)
		if (row.size() != n)
			throw std::invalid_argument("projection: not square");

	LatticeFVA F;
	F.algebra = algebra ? *algebra : TwistedGroupAlgebra::standard(L);
	F.p = p;
	F.positive_mode = positive_mode;
	F.G = L.gram_rational();

	// P1: p^2 = p
	if (mat_mul(p, p) != p)
		throw std::invalid_argument("projection: p^2 != p");
	// P2: ker p and ker (1-p) orthogonal:  p^T G (1 - p) = 0
	RatMat pbar = mat_sub(mat_identity(n), p);
	RatMat cross = mat_mul(mat_transpose(p), mat_mul(F.G, pbar));
	for (const auto &row : cross)
		for (const auto &x : row)
			if (x != 0)
				throw std::invalid_argument(
				    "projection: kernel and image not orthogonal");

	// (h,h')_p = (ph,ph') - (pbar h, pbar h')
	RatMat gl = mat_mul(mat_transpose(p), mat_mul(F.G, p));
	RatMat gr = mat_mul(mat_transpose(pbar), mat_mul(F.G, pbar));
	F.Gp = mat_sub(gl, gr);
	if (mat_det(F.Gp) == 0)
		throw std::invalid_argument("projection: (-,-)_p degenerate");

	// rational orthogonal frames of the images of p and 1-p
	auto build_frame = [&](const RatMat &proj_mat, bool left) {
		std::vector<RatVec> cols = column_space_basis(proj_mat);
		std::vector<RatVec> out;
		for (RatVec v : cols) {
			for (size_t k = 0; k < out.size(); ++k) {
				Rational num = F.pairing(v, out[k]);
				if (num != 0) {
					Rational f = num / F.pairing(out[k], out[k]);
					for (size_t j = 0; j < n; ++j)
						v[j] -= f * out[k][j];
				}
			}
			Rational nn = F.pairing(v, v);
			if (nn == 0)
				throw std::invalid_argument(
				    "projection: isotropic vector obstructs the orthogonal frame");
			if (positive_mode && nn < 0)
				throw std::invalid_argument(
				    left ? "projection: ker(1-p) not positive definite"
				         : "projection: ker p not negative definite");
			out.push_back(v);
		}
		return out;
	};
	std::vector<RatVec> fl = build_frame(p, true);
	std::vector<RatVec> fr = build_frame(pbar, false);
	F.dim_l = fl.size();
	F.frame = fl;
	F.frame.insert(F.frame.end(), fr.begin(), fr.end());
	if (F.frame.size() != n)
		throw std::invalid_argument("projection: frames do not span");
	for (const auto &u : F.frame)
		F.frame_norm.push_back(F.pairing(u, u));
	return F;
}

} // namespace fva
