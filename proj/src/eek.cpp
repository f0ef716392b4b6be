// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "gvas/eek.hpp"

#include <algorithm>
#include <map>

namespace gvas {

std::string eek_var_p(const WcnfGrammar& g, int p) { return "xP[" + g.production(p).name + "]"; }
std::string eek_var_t(const WcnfGrammar& g, int t) { return "xT[" + g.terminal_name(t) + "]"; }

LinearIntSystem build_eek(const WcnfGrammar& g, EekFlavor flavor, bool with_pt, int start) {
  if (start < 0) start = g.start();
  LinearIntSystem sys;
  const int np = static_cast<int>(g.productions().size());
  for (int p = 0; p < np; ++p) sys.add_var(eek_var_p(g, p));
  if (with_pt)
    for (int t = 0; t < g.num_terminals(); ++t) sys.add_var(eek_var_t(g, t));
  for (int a = 0; a < g.num_nonterminals(); ++a) {
    std::vector<std::pair<int, Int>> terms;
    for (int p = 0; p < np; ++p) {
      Int c = effect_column_nonterminals(g, p)[a];
      if (c != 0) terms.push_back({p, c});
    }
    Int rhs(0);
    if (flavor == EekFlavor::Standard && a == start) rhs = -1;
    sys.add_row(terms, rhs);
  }
  if (with_pt) {
    for (int t = 0; t < g.num_terminals(); ++t) {
      std::vector<std::pair<int, Int>> terms;
      terms.push_back({np + t, Int(1)});
      for (int p = 0; p < np; ++p) {
        Int c = effect_column_terminals(g, p)[t];
        if (c != 0) terms.push_back({p, -c});
      }
      sys.add_row(terms, Int(0));
    }
  }
  return sys;
}

namespace {

// Multiset-derivability of a residual production vector r, memoized. The
// occurrence count of nonterminal X after using u = v - r productions is
// determined by u alone: M(r)[X] = 1_start + eff_N . (v - r).
struct Realizer {
  const WcnfGrammar& g;
  std::vector<long long> v;
  int start;
  std::vector<std::vector<long long>> eff_n;  // per production
  std::map<std::vector<long long>, bool> memo;

  Realizer(const WcnfGrammar& g_, std::vector<long long> v_, int start_)
      : g(g_), v(std::move(v_)), start(start_) {
    for (size_t p = 0; p < g.productions().size(); ++p) {
      std::vector<long long> col;
      for (const auto& c : effect_column_nonterminals(g, static_cast<int>(p)))
        col.push_back(c.get_si());
      eff_n.push_back(std::move(col));
    }
  }

  std::vector<long long> occurrences(const std::vector<long long>& r) const {
    std::vector<long long> m(g.num_nonterminals(), 0);
    m[start] = 1;
    for (size_t p = 0; p < v.size(); ++p) {
      long long used = v[p] - r[p];
      for (int a = 0; a < g.num_nonterminals(); ++a) m[a] += used * eff_n[p][a];
    }
    return m;
  }

  bool feasible(const std::vector<long long>& r) {
    bool all_zero = std::all_of(r.begin(), r.end(), [](long long x) { return x == 0; });
    if (all_zero) return true;
    auto it = memo.find(r);
    if (it != memo.end()) return it->second;
    auto occ = occurrences(r);
    bool ok = false;
    for (size_t p = 0; p < r.size() && !ok; ++p) {
      if (r[p] == 0) continue;
      if (occ[g.production(static_cast<int>(p)).lhs] <= 0) continue;
      auto r2 = r;
      r2[p] -= 1;
      ok = feasible(r2);
    }
    memo[r] = ok;
    return ok;
  }
};

std::string vec_str(const std::vector<long long>& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

Derivation realize_impl(const WcnfGrammar& g, const std::vector<long long>& v,
                        bool homogeneous) {
  if (v.size() != g.productions().size())
    throw contract_error("realize: production vector width mismatch");
  for (long long x : v)
    if (x < 1) throw contract_error("realize: requires v >= 1, got " + vec_str(v));
  auto useful = useful_nonterminals(g);
  for (int a = 0; a < g.num_nonterminals(); ++a)
    if (!useful.count(a))
      throw contract_error("realize: nonterminal " + g.nonterminal_name(a) + " is not useful");

  const int start = g.start();
  // n_end = 1_S + eff_N . v must be >= 0; for the homogeneous case it must be
  // exactly 1_S.
  std::vector<long long> n_end(g.num_nonterminals(), 0);
  n_end[start] = 1;
  for (size_t p = 0; p < v.size(); ++p)
    for (int a = 0; a < g.num_nonterminals(); ++a) {
      Int c = effect_column_nonterminals(g, static_cast<int>(p))[a];
      n_end[a] += v[p] * c.get_si();
    }
  for (int a = 0; a < g.num_nonterminals(); ++a) {
    if (n_end[a] < 0)
      throw contract_error("realize: eff_N.v >= -1_S violated at " + g.nonterminal_name(a) +
                           " (1_S + eff_N.v has entry " + std::to_string(n_end[a]) + ")");
    if (homogeneous && n_end[a] != (a == start ? 1 : 0))
      throw contract_error("hom_realize: eff_N.v = 0 violated at " + g.nonterminal_name(a));
  }

  Realizer rz(g, v, start);
  std::vector<long long> r = v;
  if (!rz.feasible(r))
    throw contract_error("realize: production vector " + vec_str(v) + " is not derivable");

  Derivation d;
  d.tree.root = d.tree.add_node(SymbolRef{false, start});
  std::vector<int> frontier{d.tree.root};  // unexpanded nonterminal leaves, yield order
  std::vector<long long> skipped(g.num_nonterminals(), 0);
  size_t finger = 0;
  while (finger < frontier.size()) {
    int node = frontier[finger];
    int a = d.tree.nodes[node].sym.idx;
    // Candidate productions for this occurrence, most remaining budget first,
    // declaration order on ties.
    std::vector<int> cands;
    for (size_t p = 0; p < r.size(); ++p)
      if (r[p] >= 1 && g.production(static_cast<int>(p)).lhs == a)
        cands.push_back(static_cast<int>(p));
    std::stable_sort(cands.begin(), cands.end(),
                     [&](int p, int q) { return r[p] > r[q]; });
    int chosen = -1;
    for (int p : cands) {
      auto r2 = r;
      r2[p] -= 1;
      if (rz.feasible(r2)) {
        chosen = p;
        break;
      }
    }
    if (chosen < 0) {
      // This occurrence stays unexpanded; the remaining expansions of a will
      // use occurrences created later. Feasibility guarantees the budget.
      skipped[a] += 1;
      if (skipped[a] > n_end[a])
        throw contract_error("realize: internal budget mismatch at " + g.nonterminal_name(a));
      ++finger;
      continue;
    }
    r[chosen] -= 1;
    d.steps.push_back(chosen);
    const auto& prod = g.production(chosen);
    d.tree.nodes[node].production = chosen;
    std::vector<int> kids, nt_kids;
    for (auto s : prod.rhs) {
      int k = d.tree.add_node(s);
      kids.push_back(k);
      if (!s.terminal) nt_kids.push_back(k);
    }
    d.tree.nodes[node].children = kids;
    frontier.erase(frontier.begin() + finger);
    frontier.insert(frontier.begin() + finger, nt_kids.begin(), nt_kids.end());
  }
  return d;
}

}  // namespace

Derivation realize(const WcnfGrammar& g, const std::vector<long long>& v) {
  return realize_impl(g, v, false);
}

Derivation hom_realize(const WcnfGrammar& g, const std::vector<long long>& v) {
  return realize_impl(g, v, true);
}

bool check_converse(const WcnfGrammar& g, const std::vector<int>& sigma) {
  ParseTree t = replay_leftmost(g, sigma);  // throws on invalid derivations
  auto alpha = yield_of(t);
  std::vector<long long> count_p(g.productions().size(), 0);
  for (int p : sigma) count_p.at(p) += 1;

  auto pn = parikh(alpha, false, g.num_nonterminals());
  for (int a = 0; a < g.num_nonterminals(); ++a) {
    Int expect = (a == g.start()) ? 1 : 0;
    for (size_t p = 0; p < count_p.size(); ++p)
      expect += effect_column_nonterminals(g, static_cast<int>(p))[a] * count_p[p];
    if (expect != pn[a]) return false;
  }
  auto pt = parikh(alpha, true, g.num_terminals());
  for (int tt = 0; tt < g.num_terminals(); ++tt) {
    Int expect(0);
    for (size_t p = 0; p < count_p.size(); ++p)
      expect += effect_column_terminals(g, static_cast<int>(p))[tt] * count_p[p];
    if (expect != pt[tt]) return false;
  }
  return true;
}

}  // namespace gvas
