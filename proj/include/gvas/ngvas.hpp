// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0
//
// The nested-GVAS data model: a wCNF grammar whose terminals carry payloads
// (counter updates or child NGVAS), context information (unconstrained
// counters, restriction, in/out markings), and boundedness information, with
// consistency validation, bounded run semantics, and the GVAS converter.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gvas/grammar.hpp"
#include "gvas/vas.hpp"

namespace gvas {

struct Ngvas;
using NgvasPtr = std::shared_ptr<const Ngvas>;

// Payload of a grammar terminal: either a counter update (depth 0) or a
// child NGVAS.
struct TerminalPayload {
  std::optional<Update> update;
  NgvasPtr child;

  bool is_update() const { return update.has_value(); }
};

struct BoundednessInfo {
  std::set<int> wleft, wright;            // counters tracked as unbounded
  std::map<int, GenMarking> infun, outfun;  // per nonterminal

  const GenMarking& in(int nt) const { return infun.at(nt); }
  const GenMarking& out(int nt) const { return outfun.at(nt); }
};

struct Ngvas {
  std::string name;
  int dim = 0;
  WcnfGrammar grammar;
  std::vector<TerminalPayload> payload;  // per grammar terminal index
  std::set<int> unconstrained;           // Un, 0-based counters
  LinearSet restriction;
  GenMarking c_in, c_out;
  BoundednessInfo bd;
  enum class Kind { Strong, Weak } kind = Kind::Strong;

  bool is_child(int t) const { return !payload.at(t).is_update(); }
  const Update& update_of(int t) const { return *payload.at(t).update; }
  const NgvasPtr& child_of(int t) const { return payload.at(t).child; }
  std::vector<int> child_terminals() const;
  int depth() const;  // 0 when all terminals are updates

  bool branching() const { return grammar_branching(grammar); }
  // For strong non-branching grammars: the unique exit production.
  std::optional<int> exit_production() const;

  // in/out extended to arbitrary symbols: bd functions on nonterminals,
  // context markings on child terminals; update terminals have none.
  std::optional<GenMarking> in_of(SymbolRef s) const;
  std::optional<GenMarking> out_of(SymbolRef s) const;
};

struct Violation {
  std::string where;  // production / counter / child name
  std::string what;
};

// Checks every structural and consistency invariant; violations are data,
// not errors. Strong-only invariants are checked only for Kind::Strong.
std::vector<Violation> validate(const Ngvas& n);

// Trivial boundedness info: all counters in wleft = wright, every nonterminal
// mapped to the all-omega marking.
BoundednessInfo trivial_bd(const WcnfGrammar& g, int dim);

// GVAS -> NGVAS per the SCC decomposition: each grammar SCC becomes one
// strong NGVAS, lower SCCs become children, linear SCCs are split per exit
// production. Restrictions are Z^d, boundedness info is trivial.
NgvasPtr from_gvas(const WcnfGrammar& g, const std::vector<Update>& updates,
                   const Marking& m1, const Marking& m2);

// Splits a weak NGVAS into strong ones (SCC of the start symbol on top,
// lower SCCs as children, one copy per exit production for linear SCCs).
std::vector<NgvasPtr> strongdec(const Ngvas& n);

// A variant N_{(m, A, m')}: start symbol A, context (m, m'), restriction
// Z^d, Un = Omega(m) & Omega(m'); grammar and boundedness info kept.
NgvasPtr make_variant(const Ngvas& n, const GenMarking& m, int a, const GenMarking& mp);

// The reversed NGVAS: productions mirrored, updates negated, children
// reversed recursively, contexts and boundedness sides swapped, restriction
// negated. runs(reverse(n)) = reversed runs(n).
NgvasPtr reverse_ngvas(const Ngvas& n);

struct RunTriple {
  Marking source;
  Run word;
  Marking target;

  bool operator==(const RunTriple&) const = default;
};

struct EnumOptions {
  int omega_source_cap = 3;   // concretizations 0..cap per omega coordinate of c_in
  long step_budget = 200000;  // guard against epsilon-cyclic grammars
};

// All run triples (m, r, m') with |r| <= B, m (= c_in (omega coordinates
// instantiated with 0..cap), m' (= c_out, effect in the restriction, children
// evaluated recursively under their own contexts. Canonically sorted.
std::vector<RunTriple> runs_bounded(const Ngvas& n, int B, const EnumOptions& opts = {});

struct DeconstructionVerdict {
  bool ok = false;
  std::string failed_condition;  // "(i)".."(iv)", "runs"; empty when ok
  int bound = 0;
};

// Checks the deconstruction conditions (i) Un equality, (ii)/(iii) context
// specialization, (iv) restriction inclusion, plus run-set equality at bound
// B (with the enumeration caps of runs_bounded).
DeconstructionVerdict is_deconstruction(const Ngvas& n, const std::vector<NgvasPtr>& dec,
                                        int B, const EnumOptions& opts = {});

bool run_triple_less(const RunTriple& a, const RunTriple& b);

}  // namespace gvas
