// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "gvas/grammar.hpp"

#include <algorithm>
#include <functional>

namespace gvas {

int WcnfGrammar::add_nonterminal(const std::string& name) {
  if (nt_index_.count(name) || t_index_.count(name))
    throw contract_error("duplicate symbol: " + name);
  int i = static_cast<int>(nonterminals_.size());
  nonterminals_.push_back(name);
  nt_index_[name] = i;
  return i;
}

int WcnfGrammar::add_terminal(const std::string& name) {
  if (nt_index_.count(name) || t_index_.count(name))
    throw contract_error("duplicate symbol: " + name);
  int i = static_cast<int>(terminals_.size());
  terminals_.push_back(name);
  t_index_[name] = i;
  return i;
}

int WcnfGrammar::add_production(int lhs, std::vector<SymbolRef> rhs, std::string name) {
  if (rhs.size() > 2) throw contract_error("wCNF allows at most two rhs symbols");
  int p = static_cast<int>(productions_.size());
  if (name.empty()) name = "p" + std::to_string(p + 1);
  productions_.push_back(Production{lhs, std::move(rhs), std::move(name)});
  return p;
}

int WcnfGrammar::nonterminal(const std::string& name) const {
  auto it = nt_index_.find(name);
  if (it == nt_index_.end()) throw contract_error("unknown nonterminal: " + name);
  return it->second;
}

int WcnfGrammar::terminal(const std::string& name) const {
  auto it = t_index_.find(name);
  if (it == t_index_.end()) throw contract_error("unknown terminal: " + name);
  return it->second;
}

int WcnfGrammar::production_by_name(const std::string& name) const {
  for (size_t p = 0; p < productions_.size(); ++p)
    if (productions_[p].name == name) return static_cast<int>(p);
  throw contract_error("unknown production: " + name);
}

std::vector<std::string> WcnfGrammar::check_wcnf() const {
  std::vector<std::string> out;
  if (start_ < 0 || start_ >= num_nonterminals()) out.push_back("start symbol missing");
  std::set<int> seen_terminals;
  for (const auto& p : productions_) {
    if (p.rhs.size() > 2)
      out.push_back("production " + p.name + " has more than two rhs symbols");
    for (auto s : p.rhs)
      if (s.terminal) seen_terminals.insert(s.idx);
  }
  for (int t = 0; t < num_terminals(); ++t)
    if (!seen_terminals.count(t))
      out.push_back("terminal " + terminal_name(t) + " occurs on no right-hand side");
  return out;
}

namespace {

// Tarjan over the nonterminal produces-graph.
struct Tarjan {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> index, low, comp;
  std::vector<int> stack;
  std::vector<bool> on_stack;
  std::vector<std::set<int>> comps;
  int counter = 0;

  explicit Tarjan(const std::vector<std::vector<int>>& a)
      : adj(a), index(a.size(), -1), low(a.size(), 0), comp(a.size(), -1),
        on_stack(a.size(), false) {}

  void dfs(int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        dfs(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::set<int> c;
      for (;;) {
        int w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        c.insert(w);
        comp[w] = static_cast<int>(comps.size());
        if (w == v) break;
      }
      comps.push_back(std::move(c));
    }
  }
};

std::vector<std::vector<int>> produces_graph(const WcnfGrammar& g) {
  std::vector<std::vector<int>> adj(g.num_nonterminals());
  for (const auto& p : g.productions())
    for (auto s : p.rhs)
      if (!s.terminal) adj[p.lhs].push_back(s.idx);
  return adj;
}

}  // namespace

SccDecomposition sccs(const WcnfGrammar& g) {
  auto adj = produces_graph(g);
  Tarjan t(adj);
  for (int v = 0; v < g.num_nonterminals(); ++v)
    if (t.index[v] < 0) t.dfs(v);
  return SccDecomposition{std::move(t.comps), std::move(t.comp)};
}

std::set<int> scc_of(const WcnfGrammar& g, int a) {
  if (a < 0 || a >= g.num_nonterminals()) throw contract_error("scc_of: unknown symbol");
  auto d = sccs(g);
  return d.components.at(d.component_of.at(a));
}

std::set<int> generating_nonterminals(const WcnfGrammar& g) {
  std::set<int> gen;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions()) {
      if (gen.count(p.lhs)) continue;
      bool ok = true;
      for (auto s : p.rhs)
        if (!s.terminal && !gen.count(s.idx)) ok = false;
      if (ok) {
        gen.insert(p.lhs);
        changed = true;
      }
    }
  }
  return gen;
}

std::set<int> useful_nonterminals(const WcnfGrammar& g) {
  std::set<int> gen = generating_nonterminals(g);
  // Reachable through generating contexts: every sibling on the path must be
  // able to terminate for the derivation S ->* a1.A.a2 ->* word to exist.
  std::set<int> reach;
  if (g.start() >= 0 && gen.count(g.start())) reach.insert(g.start());
  bool changed = !reach.empty();
  while (changed) {
    changed = false;
    for (const auto& p : g.productions()) {
      if (!reach.count(p.lhs)) continue;
      bool siblings_ok = true;
      for (auto s : p.rhs)
        if (!s.terminal && !gen.count(s.idx)) siblings_ok = false;
      if (!siblings_ok) continue;
      for (auto s : p.rhs) {
        if (!s.terminal && !reach.count(s.idx)) {
          reach.insert(s.idx);
          changed = true;
        }
      }
    }
  }
  return reach;
}

bool scc_nonlinear(const WcnfGrammar& g, const std::set<int>& scc) {
  for (const auto& p : g.productions()) {
    if (!scc.count(p.lhs) || p.rhs.size() != 2) continue;
    if (!p.rhs[0].terminal && !p.rhs[1].terminal && scc.count(p.rhs[0].idx) &&
        scc.count(p.rhs[1].idx))
      return true;
  }
  return false;
}

std::map<int, bool> classify(const WcnfGrammar& g) {
  auto d = sccs(g);
  std::map<int, bool> out;
  for (size_t c = 0; c < d.components.size(); ++c)
    out[static_cast<int>(c)] = scc_nonlinear(g, d.components[c]);
  return out;
}

bool grammar_branching(const WcnfGrammar& g) {
  for (const auto& p : g.productions()) {
    int nts = 0;
    for (auto s : p.rhs)
      if (!s.terminal) ++nts;
    if (nts >= 2) return true;
  }
  return false;
}

bool production_is_exit(const WcnfGrammar&, const Production& p) {
  for (auto s : p.rhs)
    if (!s.terminal) return false;
  return true;
}

std::vector<long long> parikh(const std::vector<SymbolRef>& word, bool terminals,
                              int universe_size) {
  std::vector<long long> out(universe_size, 0);
  for (auto s : word)
    if (s.terminal == terminals) out.at(s.idx) += 1;
  return out;
}

std::vector<Int> effect_column_nonterminals(const WcnfGrammar& g, int p) {
  std::vector<Int> col(g.num_nonterminals(), Int(0));
  const auto& prod = g.production(p);
  for (auto s : prod.rhs)
    if (!s.terminal) col[s.idx] += 1;
  col[prod.lhs] -= 1;
  return col;
}

std::vector<Int> effect_column_terminals(const WcnfGrammar& g, int p) {
  std::vector<Int> col(g.num_terminals(), Int(0));
  for (auto s : g.production(p).rhs)
    if (s.terminal) col[s.idx] += 1;
  return col;
}

std::vector<SymbolRef> yield_of(const ParseTree& t) {
  std::vector<SymbolRef> out;
  std::function<void(int)> walk = [&](int n) {
    const auto& node = t.nodes[n];
    if (node.children.empty()) {
      out.push_back(node.sym);
      return;
    }
    for (int c : node.children) walk(c);
  };
  if (t.root >= 0) walk(t.root);
  return out;
}

std::vector<long long> parikh_productions(const WcnfGrammar& g, const ParseTree& t) {
  std::vector<long long> out(g.productions().size(), 0);
  for (const auto& n : t.nodes)
    if (n.production >= 0) out.at(n.production) += 1;
  return out;
}

int tree_height(const ParseTree& t) {
  std::function<int(int)> h = [&](int n) -> int {
    int best = 0;
    for (int c : t.nodes[n].children) best = std::max(best, 1 + h(c));
    return best;
  };
  return t.root < 0 ? 0 : h(t.root);
}

ParseTree replay_leftmost(const WcnfGrammar& g, const std::vector<int>& derivation) {
  ParseTree t;
  t.root = t.add_node(SymbolRef{false, g.start()});
  // Frontier of unexpanded nonterminal leaves, in yield order.
  std::vector<int> frontier{t.root};
  for (int p : derivation) {
    const auto& prod = g.production(p);
    auto it = std::find_if(frontier.begin(), frontier.end(), [&](int n) {
      return t.nodes[n].sym == SymbolRef{false, prod.lhs};
    });
    if (it == frontier.end())
      throw contract_error("derivation step " + prod.name +
                           " does not apply: no occurrence of its lhs");
    int n = *it;
    t.nodes[n].production = p;
    std::vector<int> kids;
    for (auto s : prod.rhs) kids.push_back(t.add_node(s));
    t.nodes[n].children = kids;
    std::vector<int> nt_kids;
    for (int k : kids)
      if (!t.nodes[k].sym.terminal) nt_kids.push_back(k);
    it = frontier.erase(it);
    frontier.insert(it, nt_kids.begin(), nt_kids.end());
  }
  return t;
}

}  // namespace gvas
