// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "gvas/widetree.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace gvas {

namespace {

void check_preconditions(const WcnfGrammar& g) {
  if (scc_of(g, g.start()).size() != static_cast<size_t>(g.num_nonterminals()))
    throw contract_error("wide tree: grammar is not strongly connected");
  if (!scc_nonlinear(g, scc_of(g, g.start())))
    throw contract_error("wide tree: grammar is linear");
  if (useful_nonterminals(g).size() != static_cast<size_t>(g.num_nonterminals()))
    throw contract_error("wide tree: grammar has non-useful nonterminals");
}

WcnfGrammar with_start(const WcnfGrammar& g, int a) {
  WcnfGrammar h = g;
  h.set_start(a);
  return h;
}

// A partial result: a parse tree whose yield contains exactly one
// nonterminal, with the provenance copy recorded per terminal leaf node.
struct Part {
  ParseTree tree;
  std::vector<int> leaf_copy;  // per node id; -1 for non-leaves
  int nt_leaf = -1;
};

struct Builder {
  const WcnfGrammar& g;
  const std::vector<std::vector<long long>>& vectors;

  Part single(int start, int copy) const {
    Derivation d = hom_realize(with_start(g, start), vectors[copy]);
    Part p;
    p.tree = d.tree;
    p.leaf_copy.assign(p.tree.nodes.size(), -1);
    for (size_t n = 0; n < p.tree.nodes.size(); ++n) {
      const auto& node = p.tree.nodes[n];
      if (!node.children.empty()) continue;
      if (node.sym.terminal)
        p.leaf_copy[n] = copy;
      else
        p.nt_leaf = static_cast<int>(n);
    }
    if (p.nt_leaf < 0) throw contract_error("wide tree: base tree lost its nonterminal leaf");
    return p;
  }

  // Clones src below dst, remapping node ids; returns the new root id.
  static int splice(Part& dst, const Part& src) {
    int offset = static_cast<int>(dst.tree.nodes.size());
    for (const auto& node : src.tree.nodes) {
      ParseTree::Node copy = node;
      for (int& c : copy.children) c += offset;
      dst.tree.nodes.push_back(copy);
    }
    dst.leaf_copy.resize(dst.tree.nodes.size(), -1);
    for (size_t n = 0; n < src.tree.nodes.size(); ++n)
      dst.leaf_copy[offset + static_cast<int>(n)] = src.leaf_copy[n];
    return offset + src.tree.root;
  }

  // Builds a tree for copies [first, first+count) with start symbol `start`.
  Part build(int start, int first, int count) const {
    Part base = single(start, first);
    if (count == 1) return base;

    // Graft point: the first exit production in declaration order used in the
    // base tree, at its first preorder occurrence. Exit subtrees are
    // all-terminal, so the point is disjoint from the nonterminal leaf and
    // its yield lies entirely on one side of it.
    int exit_prod = -1, exit_node = -1;
    for (size_t p = 0; p < g.productions().size() && exit_prod < 0; ++p) {
      if (!production_is_exit(g, g.production(static_cast<int>(p)))) continue;
      std::function<int(int)> find = [&](int n) -> int {
        if (base.tree.nodes[n].production == static_cast<int>(p)) return n;
        for (int c : base.tree.nodes[n].children) {
          int r = find(c);
          if (r >= 0) return r;
        }
        return -1;
      };
      int n = find(base.tree.root);
      if (n >= 0) {
        exit_prod = static_cast<int>(p);
        exit_node = n;
      }
    }
    if (exit_prod < 0) throw contract_error("wide tree: base tree has no exit node");
    int b = base.tree.nodes[exit_node].sym.idx;

    int k1 = (count - 1) / 2;
    int k2 = count - 1 - k1;
    Part out = base;

    if (k1 >= 1) {
      // The base's nonterminal leaf becomes the left recursive tree; the
      // left tree's own nonterminal leaf is the leaf of the result.
      Part left = build(start, first + 1, k1);
      if (left.nt_leaf == left.tree.root)
        throw contract_error("wide tree: degenerate left part");
      int sub = splice(out, left);
      int leaf = out.nt_leaf;
      hoist(out, sub, leaf);
      out.nt_leaf = left.nt_leaf + (sub - left.tree.root);
    }

    // The exit node hands its expansion to the right recursive tree: the
    // right tree hangs at the exit node's place and its nonterminal leaf
    // reapplies the exit production (those terminals keep the base copy).
    Part right = build(b, first + 1 + k1, k2);
    if (right.nt_leaf == right.tree.root)
      throw contract_error("wide tree: degenerate right part");
    int sub = splice(out, right);
    int right_leaf = right.nt_leaf + (sub - right.tree.root);
    // Move the original exit expansion under the right tree's leaf.
    out.tree.nodes[right_leaf].production = out.tree.nodes[exit_node].production;
    out.tree.nodes[right_leaf].children = out.tree.nodes[exit_node].children;
    // The exit node itself becomes the right tree's root.
    hoist(out, sub, exit_node);
    return out;
  }

  // Moves node `from` into slot `to` and detaches `from` so orphans cannot
  // distort Parikh counts.
  static void hoist(Part& out, int from, int to) {
    out.tree.nodes[to] = out.tree.nodes[from];
    out.leaf_copy[to] = out.leaf_copy[from];
    out.tree.nodes[from] = ParseTree::Node{out.tree.nodes[from].sym, -1, {}};
    out.leaf_copy[from] = -1;
  }
};

}  // namespace

ProvenancedTree build_wide_tree_multi(const WcnfGrammar& g,
                                      const std::vector<std::vector<long long>>& vectors) {
  if (vectors.empty()) throw contract_error("wide tree: needs at least one copy");
  check_preconditions(g);
  Builder b{g, vectors};
  Part part = b.build(g.start(), 0, static_cast<int>(vectors.size()));
  ProvenancedTree out;
  out.tree = std::move(part.tree);
  out.copies = static_cast<int>(vectors.size());
  std::function<void(int)> walk = [&](int n) {
    const auto& node = out.tree.nodes[n];
    if (node.children.empty()) {
      if (node.sym.terminal) out.leaf_copy.push_back(part.leaf_copy[n] + 1);
      return;
    }
    for (int c : node.children) walk(c);
  };
  walk(out.tree.root);
  out.parikh = parikh_productions(g, out.tree);
  return out;
}

ProvenancedTree build_wide_tree(const WcnfGrammar& g, const std::vector<long long>& v, int k) {
  if (k < 1) throw contract_error("wide tree: k must be positive");
  std::vector<std::vector<long long>> vectors(static_cast<size_t>(k), v);
  return build_wide_tree_multi(g, vectors);
}

int order_of(const ProvenancedTree& t) {
  const int L = static_cast<int>(t.leaf_copy.size());
  std::vector<int> first(t.copies + 1, L), last(t.copies + 1, -1);
  for (int j = 0; j < L; ++j) {
    int c = t.leaf_copy[j];
    first[c] = std::min(first[c], j);
    last[c] = std::max(last[c], j);
  }
  int best = 0;
  for (int cut = 1; cut < L; ++cut) {
    int inc = 0;
    for (int c = 1; c <= t.copies; ++c)
      if (first[c] < cut && cut <= last[c]) ++inc;
    best = std::max(best, inc);
  }
  return best;
}

long long wide_tree_height_bound(const std::vector<long long>& v, int k) {
  long long norm = 0;
  for (long long x : v) norm += std::abs(x);
  return static_cast<long long>(wide_tree_order_bound(k)) * norm;
}

int wide_tree_order_bound(int k) {
  int e = 0;
  while ((1LL << e) < k) ++e;  // ceil(log2 k)
  return 1 + e;
}

std::string wide_tree_dot(const WcnfGrammar& g, const ProvenancedTree& t) {
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                  "#66a61e", "#e6ab02", "#a6761d", "#66c2a5"};
  std::string s = "digraph widetree {\n  node [shape=box, style=filled, fillcolor=white];\n";
  std::vector<int> copy_of(t.tree.nodes.size(), -1);
  size_t j = 0;
  std::function<void(int)> walk = [&](int n) {
    const auto& node = t.tree.nodes[n];
    if (node.children.empty()) {
      if (node.sym.terminal && j < t.leaf_copy.size()) copy_of[n] = t.leaf_copy[j++];
      return;
    }
    for (int c : node.children) walk(c);
  };
  walk(t.tree.root);
  for (size_t n = 0; n < t.tree.nodes.size(); ++n) {
    const auto& node = t.tree.nodes[n];
    s += "  n" + std::to_string(n) + " [label=\"" + g.symbol_name(node.sym) + "\"";
    if (copy_of[n] > 0)
      s += ", fillcolor=\"" + std::string(palette[(copy_of[n] - 1) % 8]) + "\"";
    s += "];\n";
  }
  for (size_t n = 0; n < t.tree.nodes.size(); ++n)
    for (int c : t.tree.nodes[n].children)
      s += "  n" + std::to_string(n) + " -> n" + std::to_string(c) + ";\n";
  s += "}\n";
  return s;
}

}  // namespace gvas
