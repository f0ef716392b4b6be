// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Context-free grammars in weak Chomsky normal form: every production has at
// most two right-hand-side symbols. Terminal payloads live with the caller;
// grammar analysis is payload-agnostic.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gvas/numeric.hpp"

namespace gvas {

struct SymbolRef {
  bool terminal = false;
  int idx = -1;

  bool operator==(const SymbolRef&) const = default;
  auto operator<=>(const SymbolRef&) const = default;
};

struct Production {
  int lhs = -1;                 // nonterminal index
  std::vector<SymbolRef> rhs;   // size <= 2
  std::string name;             // p1, p2, ... unless named explicitly
};

class WcnfGrammar {
 public:
  int add_nonterminal(const std::string& name);
  int add_terminal(const std::string& name);
  int add_production(int lhs, std::vector<SymbolRef> rhs, std::string name = "");
  void set_start(int nt) { start_ = nt; }

  int start() const { return start_; }
  int num_nonterminals() const { return static_cast<int>(nonterminals_.size()); }
  int num_terminals() const { return static_cast<int>(terminals_.size()); }
  const std::string& nonterminal_name(int i) const { return nonterminals_.at(i); }
  const std::string& terminal_name(int i) const { return terminals_.at(i); }
  const std::string& symbol_name(SymbolRef s) const {
    return s.terminal ? terminal_name(s.idx) : nonterminal_name(s.idx);
  }
  int nonterminal(const std::string& name) const;
  int terminal(const std::string& name) const;
  bool has_nonterminal(const std::string& name) const { return nt_index_.count(name) != 0; }
  bool has_terminal(const std::string& name) const { return t_index_.count(name) != 0; }
  const std::vector<Production>& productions() const { return productions_; }
  const Production& production(int p) const { return productions_.at(p); }
  int production_by_name(const std::string& name) const;

  // Structural wCNF checks: disjoint alphabets, start declared, rhs <= 2,
  // every terminal occurs on some rhs. Returns human-readable violations.
  std::vector<std::string> check_wcnf() const;

 private:
  std::vector<std::string> nonterminals_, terminals_;
  std::map<std::string, int> nt_index_, t_index_;
  std::vector<Production> productions_;
  int start_ = -1;
};

// Maximal strongly connected set containing A under mutual derivability.
std::set<int> scc_of(const WcnfGrammar& g, int a);

// All SCCs over nonterminals, in reverse topological order (callees first),
// plus the SCC index per nonterminal.
struct SccDecomposition {
  std::vector<std::set<int>> components;  // reverse topological
  std::vector<int> component_of;          // per nonterminal
};
SccDecomposition sccs(const WcnfGrammar& g);

// A is useful iff S ->* a1.A.a2 ->* terminal word.
std::set<int> useful_nonterminals(const WcnfGrammar& g);
// Nonterminals that can derive a terminal word at all (the generating half).
std::set<int> generating_nonterminals(const WcnfGrammar& g);

// An SCC is non-linear iff some production has its lhs and both rhs symbols
// inside the SCC.
bool scc_nonlinear(const WcnfGrammar& g, const std::set<int>& scc);
// Per-SCC classification for the whole grammar; true = non-linear.
std::map<int, bool> classify(const WcnfGrammar& g);

// Whether the whole grammar (as one SCC) is non-branching: every persisting
// production has exactly one nonterminal on the right-hand side.
bool grammar_branching(const WcnfGrammar& g);
bool production_is_exit(const WcnfGrammar& g, const Production& p);

// Occurrence counts of the indices in `of` within `word`.
std::vector<long long> parikh(const std::vector<SymbolRef>& word, bool terminals,
                              int universe_size);

// Column p of the effect matrix over nonterminals: Parikh_N(rhs) - 1_lhs.
std::vector<Int> effect_column_nonterminals(const WcnfGrammar& g, int p);
// Column p over terminals: Parikh_T(rhs).
std::vector<Int> effect_column_terminals(const WcnfGrammar& g, int p);

// A parse tree. Internal nodes record the production applied at them; leaves
// are terminal symbols or unexpanded nonterminals.
struct ParseTree {
  struct Node {
    SymbolRef sym;
    int production = -1;          // -1 for leaves
    std::vector<int> children;    // node indices
  };
  std::vector<Node> nodes;
  int root = -1;

  int add_node(SymbolRef sym) {
    nodes.push_back(Node{sym, -1, {}});
    return static_cast<int>(nodes.size()) - 1;
  }
};

// Yield in left-to-right leaf order.
std::vector<SymbolRef> yield_of(const ParseTree& t);
// Production Parikh vector of a tree.
std::vector<long long> parikh_productions(const WcnfGrammar& g, const ParseTree& t);
int tree_height(const ParseTree& t);

// Replays a production sequence from the start symbol with the leftmost
// derivation policy: each production is applied at the leftmost occurrence of
// its left-hand side. Throws when a step does not apply. Returns the tree;
// the final sentential form is its yield.
ParseTree replay_leftmost(const WcnfGrammar& g, const std::vector<int>& derivation);

}  // namespace gvas
