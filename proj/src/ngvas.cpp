// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "gvas/ngvas.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace gvas {

std::vector<int> Ngvas::child_terminals() const {
  std::vector<int> out;
  for (int t = 0; t < grammar.num_terminals(); ++t)
    if (is_child(t)) out.push_back(t);
  return out;
}

int Ngvas::depth() const {
  int d = 0;
  for (int t : child_terminals()) d = std::max(d, 1 + child_of(t)->depth());
  return d;
}

std::optional<int> Ngvas::exit_production() const {
  for (size_t p = 0; p < grammar.productions().size(); ++p)
    if (production_is_exit(grammar, grammar.production(static_cast<int>(p))))
      return static_cast<int>(p);
  return std::nullopt;
}

std::optional<GenMarking> Ngvas::in_of(SymbolRef s) const {
  if (!s.terminal) return bd.in(s.idx);
  if (is_child(s.idx)) return child_of(s.idx)->c_in;
  return std::nullopt;
}

std::optional<GenMarking> Ngvas::out_of(SymbolRef s) const {
  if (!s.terminal) return bd.out(s.idx);
  if (is_child(s.idx)) return child_of(s.idx)->c_out;
  return std::nullopt;
}

BoundednessInfo trivial_bd(const WcnfGrammar& g, int dim) {
  BoundednessInfo bd;
  for (int i = 0; i < dim; ++i) {
    bd.wleft.insert(i);
    bd.wright.insert(i);
  }
  GenMarking omegas(dim, NatOmega::omega());
  for (int a = 0; a < g.num_nonterminals(); ++a) {
    bd.infun[a] = omegas;
    bd.outfun[a] = omegas;
  }
  return bd;
}

namespace {

std::string nt_name(const Ngvas& n, int a) { return n.grammar.nonterminal_name(a); }

void collect_symbol_names(const Ngvas& n, std::map<std::string, const Ngvas*>& owner,
                          std::vector<Violation>& out) {
  for (int a = 0; a < n.grammar.num_nonterminals(); ++a) {
    auto [it, fresh] = owner.insert({n.grammar.nonterminal_name(a), &n});
    if (!fresh && it->second != &n)
      out.push_back({n.grammar.nonterminal_name(a), "symbol name reused across sub-NGVAS"});
  }
  std::set<const Ngvas*> seen;
  for (int t : n.child_terminals()) {
    const Ngvas* c = n.child_of(t).get();
    if (seen.insert(c).second) collect_symbol_names(*c, owner, out);
  }
}

}  // namespace

std::vector<Violation> validate(const Ngvas& n) {
  std::vector<Violation> out;
  for (const auto& w : n.grammar.check_wcnf()) out.push_back({n.name, w});

  if (static_cast<int>(n.c_in.size()) != n.dim || static_cast<int>(n.c_out.size()) != n.dim)
    out.push_back({n.name, "context marking dimension mismatch"});
  if (n.restriction.dim() != n.dim)
    out.push_back({n.name, "restriction dimension mismatch"});
  {
    std::set<std::vector<long long>> ps(n.restriction.periods.begin(), n.restriction.periods.end());
    if (ps.size() != n.restriction.periods.size())
      out.push_back({n.name, "restriction period list has duplicates"});
  }
  if (static_cast<int>(n.payload.size()) != n.grammar.num_terminals())
    out.push_back({n.name, "terminal payload table size mismatch"});
  for (int t = 0; t < std::min<int>(n.payload.size(), n.grammar.num_terminals()); ++t) {
    if (n.is_child(t)) {
      if (!n.child_of(t)) out.push_back({n.grammar.terminal_name(t), "missing child"});
    } else if (static_cast<int>(n.update_of(t).size()) != n.dim) {
      out.push_back({n.grammar.terminal_name(t), "update dimension mismatch"});
    }
  }
  if (!out.empty()) return out;  // structure broken; later checks would throw

  // Un constraints.
  for (int i : n.unconstrained) {
    if (i < 0 || i >= n.dim) out.push_back({n.name, "unconstrained counter out of range"});
  }
  auto om_in = omega_set(n.c_in), om_out = omega_set(n.c_out);
  for (int i : n.unconstrained)
    if (!om_in.count(i) || !om_out.count(i))
      out.push_back({"counter " + std::to_string(i + 1),
                     "unconstrained counter not omega in c_in/c_out"});
  for (int t : n.child_terminals()) {
    const auto& c = *n.child_of(t);
    if (!std::includes(c.unconstrained.begin(), c.unconstrained.end(),
                       n.unconstrained.begin(), n.unconstrained.end()))
      out.push_back({c.name, "child does not extend the unconstrained set"});
  }

  // Boundedness info shape.
  for (int i : n.unconstrained)
    if (!n.bd.wleft.count(i) || !n.bd.wright.count(i))
      out.push_back({"counter " + std::to_string(i + 1), "Un not within wleft/wright"});
  const bool branching = n.branching();
  if (branching && n.bd.wleft != n.bd.wright)
    out.push_back({n.name, "branching grammar requires wleft = wright"});
  for (int a = 0; a < n.grammar.num_nonterminals(); ++a) {
    auto iti = n.bd.infun.find(a);
    auto ito = n.bd.outfun.find(a);
    if (iti == n.bd.infun.end() || ito == n.bd.outfun.end()) {
      out.push_back({nt_name(n, a), "boundedness info missing for nonterminal"});
      continue;
    }
    if (omega_set(iti->second) != n.bd.wleft)
      out.push_back({nt_name(n, a), "in marking omega set differs from wleft"});
    if (omega_set(ito->second) != n.bd.wright)
      out.push_back({nt_name(n, a), "out marking omega set differs from wright"});
  }
  if (!out.empty()) return out;

  // Consistency along productions. The exit production of a non-branching
  // grammar may demand reachability: specialization replaces equality there.
  for (size_t pi = 0; pi < n.grammar.productions().size(); ++pi) {
    const auto& p = n.grammar.production(static_cast<int>(pi));
    const bool relaxed = !branching && production_is_exit(n.grammar, p);
    std::optional<GenMarking> cur = n.bd.in(p.lhs);
    bool first = true;
    for (auto s : p.rhs) {
      std::optional<GenMarking> sym_in = n.in_of(s);
      if (sym_in) {
        if (cur) {
          bool ok = relaxed && first ? spec_leq(*sym_in, *cur) : (*sym_in == *cur);
          if (!ok)
            out.push_back({p.name, "in marking of " + n.grammar.symbol_name(s) +
                                        " inconsistent along production"});
        }
        cur = n.out_of(s);
      } else {
        // update terminal: out = in + u where the chain is known
        if (cur) {
          const auto& u = n.update_of(s.idx);
          GenMarking next = *cur;
          bool dead = false;
          for (int i = 0; i < n.dim; ++i) {
            next[i] = next[i] + u[i];
            if (!next[i].is_omega() && next[i].finite() < 0) dead = true;
          }
          if (dead && !relaxed)
            out.push_back({p.name, "tracked marking goes negative across update " +
                                        n.grammar.symbol_name(s)});
          cur = next;
        }
      }
      // Shielding of child terminals used in persisting productions or in
      // branching grammars.
      if (s.terminal && n.is_child(s.idx) && (branching || !relaxed)) {
        const auto& c = *n.child_of(s.idx);
        if (omega_set(c.c_in) != c.unconstrained || omega_set(c.c_out) != c.unconstrained)
          out.push_back({c.name, "child context not shielded (omega sets must equal its Un)"});
      }
      first = false;
    }
    if (cur) {
      const GenMarking& target = n.bd.out(p.lhs);
      bool ok = relaxed ? spec_leq(*cur, target) : (*cur == target);
      if (!ok) out.push_back({p.name, "out marking inconsistent along production"});
    }
  }

  // Start context specializes the tracked markings.
  if (!spec_leq(n.c_in, n.bd.in(n.grammar.start())))
    out.push_back({n.name, "c_in does not specialize in(S)"});
  if (!spec_leq(n.c_out, n.bd.out(n.grammar.start())))
    out.push_back({n.name, "c_out does not specialize out(S)"});

  // Strong-only requirements.
  if (n.kind == Ngvas::Kind::Strong) {
    if (scc_of(n.grammar, n.grammar.start()).size() !=
        static_cast<size_t>(n.grammar.num_nonterminals()))
      out.push_back({n.name, "strong NGVAS must be strongly connected"});
    if (useful_nonterminals(n.grammar).size() !=
        static_cast<size_t>(n.grammar.num_nonterminals()))
      out.push_back({n.name, "strong NGVAS must have only useful nonterminals"});
    if (!branching) {
      int exits = 0;
      for (const auto& p : n.grammar.productions())
        if (production_is_exit(n.grammar, p)) ++exits;
      if (exits != 1)
        out.push_back({n.name, "linear NGVAS must have exactly one exit production"});
    }
  }

  // Names across sub-NGVAS must not clash; children validate recursively.
  {
    std::map<std::string, const Ngvas*> owner;
    collect_symbol_names(n, owner, out);
  }
  std::set<const Ngvas*> seen;
  for (int t : n.child_terminals()) {
    const Ngvas* c = n.child_of(t).get();
    if (!seen.insert(c).second) continue;
    for (auto v : validate(*c)) {
      v.where = c->name + ": " + v.where;
      out.push_back(v);
    }
  }
  return out;
}

namespace {

struct GvasBuilder {
  const WcnfGrammar& g;
  const std::vector<Update>& updates;  // per terminal of g
  int dim;
  SccDecomposition dec;
  std::map<std::string, int> name_counter;

  std::string fresh_name(const std::string& base) {
    int k = ++name_counter[base];
    return k == 1 ? base + "~" : base + "~" + std::to_string(k);
  }

  // Builds the strong NGVAS for the SCC of nonterminal `entry`, restricted to
  // the given exit production when `only_exit` is set.
  NgvasPtr build(int entry, std::optional<int> only_exit, const GenMarking& cin,
                 const GenMarking& cout) {
    const auto& scc = dec.components[dec.component_of[entry]];
    auto n = std::make_shared<Ngvas>();
    n->dim = dim;
    n->name = fresh_name(g.nonterminal_name(entry));
    n->restriction = LinearSet::full_space(dim);
    n->c_in = cin;
    n->c_out = cout;
    n->kind = Ngvas::Kind::Strong;

    std::map<int, int> nt_map;  // g-nonterminal -> new nonterminal
    for (int a : scc) nt_map[a] = n->grammar.add_nonterminal(g.nonterminal_name(a));
    n->grammar.set_start(nt_map.at(entry));

    GenMarking omegas(dim, NatOmega::omega());
    std::map<int, int> upd_map;                 // g-terminal -> new terminal
    std::map<std::pair<int, int>, int> kid_map; // (g-nonterminal, exit or -1) -> new terminal

    auto import_symbol = [&](SymbolRef s) -> std::vector<SymbolRef> {
      if (s.terminal) {
        auto it = upd_map.find(s.idx);
        int t;
        if (it != upd_map.end()) {
          t = it->second;
        } else {
          t = n->grammar.add_terminal(g.terminal_name(s.idx));
          n->payload.push_back(TerminalPayload{updates.at(s.idx), nullptr});
          upd_map[s.idx] = t;
        }
        return {SymbolRef{true, t}};
      }
      if (scc.count(s.idx)) return {SymbolRef{false, nt_map.at(s.idx)}};
      // Lower SCC: one child per exit production when its SCC is linear with
      // several exits, a single child otherwise.
      std::vector<int> exits = split_exits(s.idx);
      std::vector<SymbolRef> alts;
      for (int e : exits) {
        auto key = std::make_pair(s.idx, e);
        auto it = kid_map.find(key);
        if (it == kid_map.end()) {
          NgvasPtr child = build(s.idx, e < 0 ? std::nullopt : std::optional<int>(e),
                                 omegas, omegas);
          int t = n->grammar.add_terminal(child->name);
          n->payload.push_back(TerminalPayload{std::nullopt, child});
          it = kid_map.insert({key, t}).first;
        }
        alts.push_back(SymbolRef{true, it->second});
      }
      return alts;
    };

    for (size_t pi = 0; pi < g.productions().size(); ++pi) {
      const auto& p = g.production(static_cast<int>(pi));
      if (!scc.count(p.lhs)) continue;
      if (only_exit) {
        // Drop the other exit productions of this (linear) SCC.
        bool is_local_exit = true;
        for (auto s : p.rhs)
          if (!s.terminal && scc.count(s.idx)) is_local_exit = false;
        if (is_local_exit && static_cast<int>(pi) != *only_exit) continue;
      }
      // Each out-of-SCC symbol may expand to several sibling children; emit
      // one production per combination.
      std::vector<std::vector<SymbolRef>> alts;
      for (auto s : p.rhs) alts.push_back(import_symbol(s));
      std::vector<std::vector<SymbolRef>> rhss{{}};
      for (const auto& a : alts) {
        std::vector<std::vector<SymbolRef>> next;
        for (const auto& partial : rhss)
          for (auto s : a) {
            auto r = partial;
            r.push_back(s);
            next.push_back(std::move(r));
          }
        rhss = std::move(next);
      }
      for (auto& rhs : rhss) n->grammar.add_production(nt_map.at(p.lhs), rhs);
    }
    n->bd = trivial_bd(n->grammar, dim);
    return n;
  }

  // The exit productions a lower SCC must be split along: indices of exit
  // productions when the SCC is linear and has more than one, {-1} otherwise.
  std::vector<int> split_exits(int entry) {
    const auto& scc = dec.components[dec.component_of[entry]];
    if (scc_nonlinear(g, scc)) return {-1};
    std::vector<int> exits;
    for (size_t pi = 0; pi < g.productions().size(); ++pi) {
      const auto& p = g.production(static_cast<int>(pi));
      if (!scc.count(p.lhs)) continue;
      bool local_exit = true;
      for (auto s : p.rhs)
        if (!s.terminal && scc.count(s.idx)) local_exit = false;
      if (local_exit) exits.push_back(static_cast<int>(pi));
    }
    if (exits.size() <= 1) return {-1};
    return exits;
  }
};

// Removes non-useful nonterminals and the productions touching them.
WcnfGrammar prune_useless(const WcnfGrammar& g, std::vector<int>* terminal_map) {
  auto useful = useful_nonterminals(g);
  WcnfGrammar h;
  std::map<int, int> nt_map;
  for (int a = 0; a < g.num_nonterminals(); ++a)
    if (useful.count(a) || a == g.start()) nt_map[a] = h.add_nonterminal(g.nonterminal_name(a));
  h.set_start(nt_map.at(g.start()));
  std::map<int, int> t_map;
  for (const auto& p : g.productions()) {
    if (!useful.count(p.lhs)) continue;
    bool ok = true;
    for (auto s : p.rhs)
      if (!s.terminal && !useful.count(s.idx)) ok = false;
    if (!ok) continue;
    std::vector<SymbolRef> rhs;
    for (auto s : p.rhs) {
      if (s.terminal) {
        auto it = t_map.find(s.idx);
        if (it == t_map.end())
          it = t_map.insert({s.idx, h.add_terminal(g.terminal_name(s.idx))}).first;
        rhs.push_back(SymbolRef{true, it->second});
      } else {
        rhs.push_back(SymbolRef{false, nt_map.at(s.idx)});
      }
    }
    h.add_production(nt_map.at(p.lhs), rhs, p.name);
  }
  if (terminal_map) {
    terminal_map->assign(h.num_terminals(), -1);
    for (auto [old_t, new_t] : t_map) (*terminal_map)[new_t] = old_t;
  }
  return h;
}

}  // namespace

NgvasPtr from_gvas(const WcnfGrammar& g, const std::vector<Update>& updates,
                   const Marking& m1, const Marking& m2) {
  auto errs = g.check_wcnf();
  if (!errs.empty()) throw contract_error("from_gvas: " + errs.front());
  if (updates.size() != static_cast<size_t>(g.num_terminals()))
    throw contract_error("from_gvas: one update payload per terminal required");
  int dim = static_cast<int>(m1.size());
  std::vector<int> tmap;
  WcnfGrammar pruned = prune_useless(g, &tmap);
  std::vector<Update> pruned_updates;
  for (int t = 0; t < pruned.num_terminals(); ++t) pruned_updates.push_back(updates.at(tmap[t]));

  GvasBuilder b{pruned, pruned_updates, dim, sccs(pruned), {}};
  auto top_exits = b.split_exits(pruned.start());
  if (top_exits.size() == 1) {
    auto n = std::const_pointer_cast<Ngvas>(
        b.build(pruned.start(), std::nullopt, to_generalized(m1), to_generalized(m2)));
    return n;
  }
  // The top SCC is linear with several exit productions; the result is the
  // weak NGVAS whose strongdec gives the strong pieces.
  auto n = std::make_shared<Ngvas>();
  n->dim = dim;
  n->name = "gvas";
  n->grammar = pruned;
  for (int t = 0; t < pruned.num_terminals(); ++t)
    n->payload.push_back(TerminalPayload{pruned_updates[t], nullptr});
  n->restriction = LinearSet::full_space(dim);
  n->c_in = to_generalized(m1);
  n->c_out = to_generalized(m2);
  n->bd = trivial_bd(n->grammar, dim);
  n->kind = Ngvas::Kind::Weak;
  return n;
}

std::vector<NgvasPtr> strongdec(const Ngvas& n) {
  // Express the NGVAS as a GVAS-like grammar whose terminals carry the
  // payloads of n, then rebuild bottom-up. Children of n stay as they are.
  struct Builder {
    const Ngvas& n;
    SccDecomposition dec;
    std::map<std::string, int> name_counter;

    std::string fresh_name(const std::string& base) {
      int k = ++name_counter[base];
      return k == 1 ? base : base + "~" + std::to_string(k);
    }

    std::vector<int> local_exits(const std::set<int>& scc) const {
      std::vector<int> exits;
      for (size_t pi = 0; pi < n.grammar.productions().size(); ++pi) {
        const auto& p = n.grammar.production(static_cast<int>(pi));
        if (!scc.count(p.lhs)) continue;
        bool local_exit = true;
        for (auto s : p.rhs)
          if (!s.terminal && scc.count(s.idx)) local_exit = false;
        if (local_exit) exits.push_back(static_cast<int>(pi));
      }
      return exits;
    }

    NgvasPtr build(int entry, std::optional<int> only_exit, const GenMarking& cin,
                   const GenMarking& cout, const LinearSet& restriction,
                   const std::set<int>& un) {
      const auto& scc = dec.components[dec.component_of[entry]];
      auto out = std::make_shared<Ngvas>();
      out->dim = n.dim;
      out->name = fresh_name(n.name + "." + n.grammar.nonterminal_name(entry));
      out->restriction = restriction;
      out->c_in = cin;
      out->c_out = cout;
      out->unconstrained = un;
      out->kind = Ngvas::Kind::Strong;

      std::map<int, int> nt_map;
      for (int a : scc) nt_map[a] = out->grammar.add_nonterminal(n.grammar.nonterminal_name(a));
      out->grammar.set_start(nt_map.at(entry));

      std::map<int, int> term_map;                  // n-terminal -> new terminal
      std::map<std::pair<int, int>, int> kid_map;   // (nonterminal, exit) -> new terminal

      auto import_symbol = [&](SymbolRef s) -> std::vector<SymbolRef> {
        if (s.terminal) {
          auto it = term_map.find(s.idx);
          if (it == term_map.end()) {
            int t = out->grammar.add_terminal(n.grammar.terminal_name(s.idx));
            out->payload.push_back(n.payload.at(s.idx));
            it = term_map.insert({s.idx, t}).first;
          }
          return {SymbolRef{true, it->second}};
        }
        if (scc.count(s.idx)) return {SymbolRef{false, nt_map.at(s.idx)}};
        const auto& sub = dec.components[dec.component_of[s.idx]];
        std::vector<int> exits;
        if (!scc_nonlinear(n.grammar, sub) && local_exits(sub).size() > 1)
          exits = local_exits(sub);
        else
          exits = {-1};
        std::vector<SymbolRef> alts;
        for (int e : exits) {
          auto key = std::make_pair(s.idx, e);
          auto it = kid_map.find(key);
          if (it == kid_map.end()) {
            NgvasPtr child =
                build(s.idx, e < 0 ? std::nullopt : std::optional<int>(e), n.bd.in(s.idx),
                      n.bd.out(s.idx), LinearSet::full_space(n.dim), un);
            int t = out->grammar.add_terminal(child->name);
            out->payload.push_back(TerminalPayload{std::nullopt, child});
            it = kid_map.insert({key, t}).first;
          }
          alts.push_back(SymbolRef{true, it->second});
        }
        return alts;
      };

      for (size_t pi = 0; pi < n.grammar.productions().size(); ++pi) {
        const auto& p = n.grammar.production(static_cast<int>(pi));
        if (!scc.count(p.lhs)) continue;
        if (only_exit) {
          bool local_exit = true;
          for (auto s : p.rhs)
            if (!s.terminal && scc.count(s.idx)) local_exit = false;
          if (local_exit && static_cast<int>(pi) != *only_exit) continue;
        }
        std::vector<std::vector<SymbolRef>> alts;
        for (auto s : p.rhs) alts.push_back(import_symbol(s));
        std::vector<std::vector<SymbolRef>> rhss{{}};
        for (const auto& a : alts) {
          std::vector<std::vector<SymbolRef>> next;
          for (const auto& partial : rhss)
            for (auto s : a) {
              auto r = partial;
              r.push_back(s);
              next.push_back(std::move(r));
            }
          rhss = std::move(next);
        }
        for (auto& rhs : rhss) out->grammar.add_production(nt_map.at(p.lhs), rhs, p.name);
      }
      // Boundedness info restricted to the local nonterminals.
      out->bd.wleft = n.bd.wleft;
      out->bd.wright = n.bd.wright;
      for (int a : scc) {
        out->bd.infun[nt_map.at(a)] = n.bd.in(a);
        out->bd.outfun[nt_map.at(a)] = n.bd.out(a);
      }
      return out;
    }
  };

  Builder b{n, sccs(n.grammar), {}};
  const auto& top = b.dec.components[b.dec.component_of[n.grammar.start()]];
  std::vector<int> exits = b.local_exits(top);
  std::vector<NgvasPtr> out;
  if (!scc_nonlinear(n.grammar, top) && exits.size() > 1) {
    for (int e : exits)
      out.push_back(b.build(n.grammar.start(), e, n.c_in, n.c_out, n.restriction,
                            n.unconstrained));
  } else {
    out.push_back(b.build(n.grammar.start(), std::nullopt, n.c_in, n.c_out, n.restriction,
                          n.unconstrained));
  }
  return out;
}

NgvasPtr make_variant(const Ngvas& n, const GenMarking& m, int a, const GenMarking& mp) {
  auto v = std::make_shared<Ngvas>(n);
  v->name = n.name + "[" + to_string(m) + "," + n.grammar.nonterminal_name(a) + "," +
            to_string(mp) + "]";
  v->grammar.set_start(a);
  v->c_in = m;
  v->c_out = mp;
  v->restriction = LinearSet::full_space(n.dim);
  v->unconstrained.clear();
  auto oi = omega_set(m), oo = omega_set(mp);
  std::set_intersection(oi.begin(), oi.end(), oo.begin(), oo.end(),
                        std::inserter(v->unconstrained, v->unconstrained.begin()));
  return v;
}

NgvasPtr reverse_ngvas(const Ngvas& n) {
  auto r = std::make_shared<Ngvas>();
  r->name = n.name + ".rev";
  r->dim = n.dim;
  r->grammar = n.grammar;
  // Mirror every production.
  {
    WcnfGrammar g;
    for (int a = 0; a < n.grammar.num_nonterminals(); ++a)
      g.add_nonterminal(n.grammar.nonterminal_name(a));
    for (int t = 0; t < n.grammar.num_terminals(); ++t)
      g.add_terminal(n.grammar.terminal_name(t));
    g.set_start(n.grammar.start());
    for (const auto& p : n.grammar.productions()) {
      auto rhs = p.rhs;
      std::reverse(rhs.begin(), rhs.end());
      g.add_production(p.lhs, rhs, p.name);
    }
    r->grammar = g;
  }
  for (int t = 0; t < n.grammar.num_terminals(); ++t) {
    if (n.is_child(t)) {
      r->payload.push_back(TerminalPayload{std::nullopt, reverse_ngvas(*n.child_of(t))});
    } else {
      Update u = n.update_of(t);
      for (auto& x : u) x = -x;
      r->payload.push_back(TerminalPayload{u, nullptr});
    }
  }
  r->unconstrained = n.unconstrained;
  r->restriction.base = n.restriction.base;
  for (auto& x : r->restriction.base) x = -x;
  for (const auto& p : n.restriction.periods) {
    auto q = p;
    for (auto& x : q) x = -x;
    r->restriction.periods.push_back(q);
  }
  r->c_in = n.c_out;
  r->c_out = n.c_in;
  r->bd.wleft = n.bd.wright;
  r->bd.wright = n.bd.wleft;
  for (auto& [a, m] : n.bd.infun) r->bd.outfun[a] = m;
  for (auto& [a, m] : n.bd.outfun) r->bd.infun[a] = m;
  r->kind = n.kind;
  return r;
}

// ---------------------------------------------------------------------------
// Bounded run enumeration.

namespace {

struct Enumerator {
  EnumOptions opts;
  long steps = 0;

  struct Result {
    std::vector<std::pair<Run, Marking>> completions;
    int lowlink;  // minimal active depth this result depends on
  };

  // Memo for full sentential-form states plus cycle cutting for derivation
  // loops that consume no budget.
  struct Key {
    const Ngvas* owner;
    std::vector<SymbolRef> form;
    Marking m;
    int budget;
    bool operator<(const Key& o) const {
      return std::tie(owner, form, m, budget) < std::tie(o.owner, o.form, o.m, o.budget);
    }
  };
  std::map<Key, std::vector<std::pair<Run, Marking>>> memo;
  std::map<Key, int> active;  // key -> depth
  int depth = 0;

  std::map<const Ngvas*, std::vector<long long>> min_updates_cache;

  // Lower bound on the number of updates any terminal word derived from a
  // nonterminal must contain; ignores contexts, so it is sound for pruning.
  const std::vector<long long>& min_updates(const Ngvas& n) {
    auto it = min_updates_cache.find(&n);
    if (it != min_updates_cache.end()) return it->second;
    const long long inf = 1e15;
    std::vector<long long> mu(n.grammar.num_nonterminals(), inf);
    auto term_cost = [&](SymbolRef s) -> long long {
      if (!s.terminal) return -1;
      if (n.is_child(s.idx)) {
        const auto& c = *n.child_of(s.idx);
        return min_updates(c)[c.grammar.start()];
      }
      return 1;
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& p : n.grammar.productions()) {
        long long cost = 0;
        for (auto s : p.rhs) {
          long long tc = term_cost(s);
          cost += tc >= 0 ? tc : mu[s.idx];
          if (cost >= inf) { cost = inf; break; }
        }
        if (cost < mu[p.lhs]) {
          mu[p.lhs] = cost;
          changed = true;
        }
      }
    }
    return min_updates_cache.emplace(&n, std::move(mu)).first->second;
  }

  long long form_lower_bound(const Ngvas& n, const std::vector<SymbolRef>& form) {
    const auto& mu = min_updates(n);
    long long lb = 0;
    for (auto s : form) {
      if (s.terminal) {
        if (n.is_child(s.idx)) {
          const auto& c = *n.child_of(s.idx);
          lb += min_updates(c)[c.grammar.start()];
        } else {
          lb += 1;
        }
      } else {
        lb += mu[s.idx];
      }
      if (lb > 1e14) break;
    }
    return lb;
  }

  // Completions of `form` from marking m with at most `budget` updates.
  Result expand(const Ngvas& n, const std::vector<SymbolRef>& form, const Marking& m,
                int budget) {
    if (++steps > opts.step_budget)
      throw budget_exhausted("runs_bounded: step budget exhausted");
    if (form.empty()) return {{{Run{}, m}}, depth + 1};
    if (form_lower_bound(n, form) > budget) return {{}, depth + 1};

    Key key{&n, form, m, budget};
    if (auto it = memo.find(key); it != memo.end()) return {it->second, depth + 1};
    if (auto it = active.find(key); it != active.end()) return {{}, it->second};

    active[key] = ++depth;
    const int my_depth = depth;
    int lowlink = my_depth + 1;
    std::vector<std::pair<Run, Marking>> acc;

    SymbolRef head = form.front();
    std::vector<SymbolRef> rest(form.begin() + 1, form.end());

    auto continue_with = [&](const Run& prefix, const Marking& mid, int used) {
      Result r = expand(n, rest, mid, budget - used);
      lowlink = std::min(lowlink, r.lowlink);
      for (auto& [run, end] : r.completions) {
        Run full;
        full.updates = prefix.updates;
        full.updates.insert(full.updates.end(), run.updates.begin(), run.updates.end());
        acc.push_back({std::move(full), end});
      }
    };

    if (head.terminal && !n.is_child(head.idx)) {
      const Update& u = n.update_of(head.idx);
      if (budget >= 1) {
        Marking next = m;
        bool ok = true;
        for (int i = 0; i < n.dim; ++i) {
          next[i] += u[i];
          if (next[i] < 0) ok = false;
        }
        if (ok) continue_with(Run{{u}}, next, 1);
      }
    } else if (head.terminal) {
      const Ngvas& c = *n.child_of(head.idx);
      if (spec_leq(to_generalized(m), c.c_in)) {
        Result inner = expand(c, {SymbolRef{false, c.grammar.start()}}, m, budget);
        lowlink = std::min(lowlink, inner.lowlink);
        for (auto& [run, end] : inner.completions) {
          if (!spec_leq(to_generalized(end), c.c_out)) continue;
          std::vector<long long> eff(n.dim);
          for (int i = 0; i < n.dim; ++i) eff[i] = end[i] - m[i];
          if (!linset_member(eff, c.restriction)) continue;
          continue_with(run, end, static_cast<int>(run.updates.size()));
        }
      }
    } else {
      for (size_t pi = 0; pi < n.grammar.productions().size(); ++pi) {
        const auto& p = n.grammar.production(static_cast<int>(pi));
        if (p.lhs != head.idx) continue;
        std::vector<SymbolRef> nform = p.rhs;
        nform.insert(nform.end(), rest.begin(), rest.end());
        Result r = expand(n, nform, m, budget);
        lowlink = std::min(lowlink, r.lowlink);
        for (auto& c : r.completions) acc.push_back(c);
      }
    }

    // Canonicalize.
    std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) {
      return std::tie(a.first.updates, a.second) < std::tie(b.first.updates, b.second);
    });
    acc.erase(std::unique(acc.begin(), acc.end(),
                          [](const auto& a, const auto& b) {
                            return a.first.updates == b.first.updates && a.second == b.second;
                          }),
              acc.end());

    active.erase(key);
    --depth;
    // Only cache results that do not depend on a still-active ancestor; those
    // would be incomplete outside this recursion.
    if (lowlink > my_depth) memo.emplace(key, acc);
    return {std::move(acc), std::min(lowlink, my_depth + 1)};
  }
};

std::vector<Marking> concretize_sources(const GenMarking& cin, int cap) {
  std::vector<Marking> out{Marking{}};
  for (const auto& c : cin) {
    std::vector<Marking> next;
    for (const auto& m : out) {
      if (c.is_omega()) {
        for (int v = 0; v <= cap; ++v) {
          auto q = m;
          q.push_back(v);
          next.push_back(std::move(q));
        }
      } else {
        auto q = m;
        q.push_back(c.finite());
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

bool run_triple_less(const RunTriple& a, const RunTriple& b) {
  return std::tie(a.source, a.word.updates, a.target) <
         std::tie(b.source, b.word.updates, b.target);
}

std::vector<RunTriple> runs_bounded(const Ngvas& n, int B, const EnumOptions& opts) {
  Enumerator en{opts};
  std::vector<RunTriple> out;
  for (const auto& src : concretize_sources(n.c_in, opts.omega_source_cap)) {
    auto res = en.expand(n, {SymbolRef{false, n.grammar.start()}}, src, B);
    for (auto& [run, end] : res.completions) {
      if (!spec_leq(to_generalized(end), n.c_out)) continue;
      std::vector<long long> eff(n.dim);
      for (int i = 0; i < n.dim; ++i) eff[i] = end[i] - src[i];
      if (!linset_member(eff, n.restriction)) continue;
      out.push_back(RunTriple{src, run, end});
    }
  }
  std::sort(out.begin(), out.end(), run_triple_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DeconstructionVerdict is_deconstruction(const Ngvas& n, const std::vector<NgvasPtr>& dec,
                                        int B, const EnumOptions& opts) {
  for (const auto& m : dec) {
    if (m->unconstrained != n.unconstrained) return {false, "(i)", B};
    if (!spec_leq(m->c_in, n.c_in)) return {false, "(ii)", B};
    if (!spec_leq(m->c_out, n.c_out)) return {false, "(iii)", B};
    std::set<std::vector<long long>> parent_periods(n.restriction.periods.begin(),
                                                    n.restriction.periods.end());
    for (const auto& p : m->restriction.periods)
      if (!parent_periods.count(p) && !n.restriction.is_full_space())
        return {false, "(iv)", B};
    if (!linset_member(m->restriction.base, n.restriction)) return {false, "(iv)", B};
  }
  auto lhs = runs_bounded(n, B, opts);
  std::vector<RunTriple> rhs;
  for (const auto& m : dec) {
    auto part = runs_bounded(*m, B, opts);
    rhs.insert(rhs.end(), part.begin(), part.end());
  }
  std::sort(rhs.begin(), rhs.end(), run_triple_less);
  rhs.erase(std::unique(rhs.begin(), rhs.end()), rhs.end());
  if (lhs != rhs) return {false, "runs", B};
  return {true, "", B};
}

}  // namespace gvas
