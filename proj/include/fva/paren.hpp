#pragma once

#include "fva/series.hpp"
#include <string>
#include <vector>

namespace fva {

/// Parenthesized product of {1..n} (P_n) or {1..n, *} with * rightmost (Q_n),
/// as a full binary tree with the edge numbering and node variables of the
/// appendix rules.  Leaf label 0 stands for the star.
struct Parenthesization
{
	struct Node
	{
		int leaf = -1; // >= 0: leaf label (0 = star); -1: internal
		int l = -1, r = -1;
		int edge = 0;     // edge number above this node
		int var_i = 0, var_j = 0; // node variable z_i - z_j (internal only)
	};

	std::string text;
	std::vector<Node> nodes;
	int root = -1;
	int nleaves = 0; // without the star
	bool has_star = false;

	// derived, DFS order (root first): one entry per internal node
	std::vector<int> var_nodes;          // node index per variable
	std::vector<std::string> var_names;  // "z14" or "z1" style

	bool is_leaf(int v) const { return nodes[v].leaf >= 0; }

	std::string var_name_of(int node) const
	{
		const Node &n = nodes[node];
		std::string s = "z" + std::to_string(n.var_i);
		if (n.var_j != 0)
			s += std::to_string(n.var_j);
		return s;
	}

	/// position of a node's variable in the DFS variable list
	size_t var_pos(int node) const
	{
		for (size_t k = 0; k < var_nodes.size(); ++k)
			if (var_nodes[k] == node)
				return k;
		throw std::logic_error("var_pos");
	}

	/// true if node a is an ancestor of (or equal to) node b
	bool ancestor_of(int a, int b) const
	{
		if (a == b)
			return true;
		if (is_leaf(a))
			return false;
		return ancestor_of(nodes[a].l, b) || ancestor_of(nodes[a].r, b);
	}
};

inline Parenthesization parse_paren(const std::string &s)
{
	Parenthesization p;
	p.text = s;
	size_t pos = 0;
	auto fail = [&](const std::string &msg) {
		throw std::invalid_argument("parse error at position " +
		                            std::to_string(pos) + ": " + msg);
	};
	// grammar: product := factor factor; factor := digit | '*' | '(' product ')'
	std::function<int()> product;
	std::function<int()> factor = [&]() -> int {
		if (pos >= s.size())
			fail("unexpected end of input");
		char c = s[pos];
		if (c >= '1' && c <= '9') {
			++pos;
			p.nodes.push_back({c - '0'});
			return int(p.nodes.size()) - 1;
		}
		if (c == '*') {
			++pos;
			p.nodes.push_back({0});
			return int(p.nodes.size()) - 1;
		}
		if (c == '(') {
			++pos;
			int v = product();
			if (pos >= s.size() || s[pos] != ')')
				fail("expected ')'");
			++pos;
			return v;
		}
		fail("expected digit, '*' or '('");
		return -1;
	};
	product = [&]() -> int {
		int l = factor();
		int r = factor();
		Parenthesization::Node n;
		n.l = l;
		n.r = r;
		p.nodes.push_back(n);
		return int(p.nodes.size()) - 1;
	};
	p.root = product();
	if (pos != s.size())
		fail("trailing input");

	// leaf labels: a permutation of 1..n, star (if any) rightmost
	std::vector<int> labels;
	std::function<void(int)> collect = [&](int v) {
		if (p.is_leaf(v)) {
			labels.push_back(p.nodes[v].leaf);
			return;
		}
		collect(p.nodes[v].l);
		collect(p.nodes[v].r);
	};
	collect(p.root);
	for (size_t i = 0; i < labels.size(); ++i)
		if (labels[i] == 0) {
			p.has_star = true;
			if (i + 1 != labels.size())
				throw std::invalid_argument("star must be the rightmost leaf");
		}
	p.nleaves = int(labels.size()) - (p.has_star ? 1 : 0);
	std::vector<bool> seen(size_t(p.nleaves) + 1, false);
	for (int l : labels) {
		if (l == 0)
			continue;
		if (l > p.nleaves || seen[size_t(l)])
			throw std::invalid_argument("leaf labels must be exactly 1.." +
			                            std::to_string(p.nleaves));
		seen[size_t(l)] = true;
	}

	// edge numbers: leaf edge = label, node edge = right child's edge
	std::function<int(int)> number = [&](int v) -> int {
		Parenthesization::Node &n = p.nodes[v];
		if (n.leaf >= 0)
			return n.edge = n.leaf;
		number(n.l);
		n.edge = number(n.r);
		n.var_i = p.nodes[n.l].edge;
		n.var_j = p.nodes[n.r].edge;
		return n.edge;
	};
	number(p.root);

	// variables in DFS order, root first
	std::function<void(int)> vars = [&](int v) {
		if (p.is_leaf(v))
			return;
		p.var_nodes.push_back(v);
		vars(p.nodes[v].l);
		vars(p.nodes[v].r);
	};
	vars(p.root);
	for (int v : p.var_nodes)
		p.var_names.push_back(p.var_name_of(v));
	return p;
}

/// is the four-point tree S4-conjugate to (12)(34)?
inline bool is_channel_class(const Parenthesization &p)
{
	if (p.has_star || p.nleaves != 4)
		return false;
	const auto &rt = p.nodes[p.root];
	return !p.is_leaf(rt.l) && !p.is_leaf(rt.r);
}

/// region window: one entry per non-root internal node covering the node
/// variables of its subtree.  Channel-class trees additionally track the
/// joint direction of both inner variables (the (y z)/x^2 bidegree), which
/// the channel inverse map reads.
inline Window paren_window(const Parenthesization &p)
{
	Window w;
	for (size_t k = 1; k < p.var_nodes.size(); ++k) {
		WinEntry e;
		e.w.assign(p.var_nodes.size(), Rational(0));
		int n = p.var_nodes[k];
		for (size_t j = 0; j < p.var_nodes.size(); ++j)
			if (p.ancestor_of(n, p.var_nodes[j]))
				e.w[j] = 1;
		w.entries.push_back(e);
	}
	if (is_channel_class(p)) {
		WinEntry e;
		e.w.assign(p.var_nodes.size(), Rational(0));
		for (size_t j = 1; j < p.var_nodes.size(); ++j)
			e.w[j] = 1;
		w.entries.push_back(e);
	}
	return w;
}

/// the permutation of 1..4 mapping the standard element of the same shape
/// onto A (leaves read left to right)
inline Perm4 paren_sigma(const Parenthesization &p)
{
	if (p.nleaves != 4 || p.has_star)
		throw std::invalid_argument("paren_sigma: P4 element expected");
	std::vector<int> labels;
	std::function<void(int)> collect = [&](int v) {
		if (p.is_leaf(v)) {
			labels.push_back(p.nodes[v].leaf);
			return;
		}
		collect(p.nodes[v].l);
		collect(p.nodes[v].r);
	};
	collect(p.root);
	Perm4 s{};
	for (int i = 0; i < 4; ++i)
		s[i] = uint8_t(labels[size_t(i)] - 1);
	return s;
}

/// shape string: leaves replaced by 1..4 in reading order
inline std::string paren_shape(const Parenthesization &p)
{
	std::string out;
	int next = 1;
	for (char c : p.text) {
		if (c >= '1' && c <= '9')
			out += char('0' + next++);
		else
			out += c;
	}
	return out;
}

/// tau: P4 -> S4 fixing the chart of the expansion; the table on standard
/// elements, extended by tau(sigma A) = sigma tau(A)
inline Perm4 tau(const Parenthesization &p)
{
	std::string shape = paren_shape(p);
	Perm4 base;
	if (shape == "(12)(34)" || shape == "((12)3)4" || shape == "1(2(34))")
		base = perm4_identity();
	else if (shape == "(1(23))4" || shape == "1((23)4)")
		base = perm4({3, 2, 1, 4});
	else
		throw std::invalid_argument("tau: unknown P4 shape " + shape);
	return perm4_mul(paren_sigma(p), base);
}

/// apply sigma to the leaf labels of a tree
inline Parenthesization paren_permute(const Perm4 &sigma, const Parenthesization &p)
{
	std::string out;
	for (char c : p.text) {
		if (c >= '1' && c <= '9')
			out += char('1' + sigma[size_t(c - '1')]);
		else
			out += c;
	}
	return parse_paren(out);
}

/// index of the star's parent node
inline int star_parent(const Parenthesization &p)
{
	for (size_t v = 0; v < p.nodes.size(); ++v)
		if (!p.is_leaf(int(v)) && p.nodes[p.nodes[v].r].leaf == 0)
			return int(v);
	throw std::invalid_argument("no star");
}

/// delete the star leaf and its parent node (Q_n -> P_n)
inline Parenthesization paren_unstar(const Parenthesization &p)
{
	if (!p.has_star)
		throw std::invalid_argument("paren_unstar: no star");
	int ps = star_parent(p);
	// re-render with the star's parent replaced by its left child
	std::function<std::string(int, bool)> render = [&](int v, bool top) -> std::string {
		if (v == ps)
			return render(p.nodes[v].l, top);
		const auto &n = p.nodes[v];
		if (n.leaf >= 0)
			return std::to_string(n.leaf);
		auto child = [&](int c) {
			std::string s = render(c, false);
			return (p.is_leaf(c) || c == ps) && s.size() == 1 ? s : "(" + s + ")";
		};
		return child(n.l) + child(n.r);
	};
	return parse_paren(render(p.root, true));
}

} // namespace fva
