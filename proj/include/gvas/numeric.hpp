// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Exact rational arithmetic, integer linear systems, LP/ILP feasibility,
// support computation, and linear-set membership. Everything in here is
// exact; no floating point is used anywhere in the decision paths.

#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gvas {

using Int = mpz_class;
using Rat = mpq_class;  // always canonical: gcd(|num|,den)=1, den>0

// Thrown when a caller violates a documented precondition.
struct contract_error : std::runtime_error {
  explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a search exceeds its configured node budget.
struct budget_exhausted : std::runtime_error {
  explicit budget_exhausted(const std::string& what) : std::runtime_error(what) {}
};

inline Int rat_floor(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}
inline Int rat_ceil(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}
inline bool rat_is_int(const Rat& q) { return q.get_den() == 1; }

// A system of integer linear equalities over named variables.
// Every variable has a lower bound (0 or 1), and optionally a finite upper
// bound; absent upper bound means unbounded.
class LinearIntSystem {
 public:
  struct Row {
    std::vector<Int> coef;  // one entry per variable, declared order
    Int rhs;
  };

  int add_var(const std::string& name, const Int& lower = 0,
              std::optional<Int> upper = std::nullopt);
  int var(const std::string& name) const;  // throws on unknown
  bool has_var(const std::string& name) const { return index_.count(name) != 0; }
  int num_vars() const { return static_cast<int>(names_.size()); }
  const std::string& name(int v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }

  // Adds the equality sum_i coef[i]*x_i = rhs. coef must have num_vars entries.
  void add_row(std::vector<Int> coef, Int rhs);
  // Sparse variant.
  void add_row(const std::vector<std::pair<int, Int>>& terms, Int rhs);

  void set_fixed(int v, const Int& value);
  void set_lower(int v, const Int& lo);
  void set_upper(int v, std::optional<Int> up);
  const Int& lower(int v) const { return lower_.at(v); }
  const std::optional<Int>& upper(int v) const { return upper_.at(v); }

  const std::vector<Row>& rows() const { return rows_; }
  bool homogeneous() const;  // all rhs zero and all lower bounds zero

  // Exact check: does the integer assignment satisfy every equality and bound?
  bool satisfied_by(const std::vector<Int>& x) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<Row> rows_;
  std::vector<Int> lower_;
  std::vector<std::optional<Int>> upper_;
};

struct LpResult {
  enum class Status { Infeasible, Optimal, Unbounded } status;
  Rat value;                // optimum when Optimal
  std::vector<Rat> point;   // feasible point (Optimal and Unbounded)
  std::vector<Rat> ray;     // improving ray when Unbounded
};

// Exact-rational simplex with Bland's rule; maximizes objective over the
// rational relaxation of the system.
LpResult lp_maximize(const LinearIntSystem& sys, const std::vector<Rat>& objective);

struct LpFeasibility {
  bool sat;
  std::vector<Rat> witness;
};

// Rational feasibility with x[v] > 0 required for every v in strict_positive.
// All variables are nonnegative, so per-variable positive witnesses can be
// averaged into a single simultaneous witness.
LpFeasibility lp_feasible(const LinearIntSystem& sys, const std::set<int>& strict_positive);

struct IlpOptions {
  long node_budget = 1000000;
};

struct IlpResult {
  enum class Status { Sat, Unsat } status;
  std::vector<Int> witness;  // lex-least under reversed variable significance
  long nodes = 0;
};

// Integer feasibility by branch-and-bound over the exact LP relaxation.
// Unbounded variables are capped by a computed a-priori bound on minimal
// solutions, which makes the search complete. Witness tie-break: the witness
// minimizes (x_n, ..., x_1) lexicographically, i.e. earlier-declared variables
// are the most significant and are made large last.
IlpResult ilp_solve(const LinearIntSystem& sys, const IlpOptions& opts = {});

// SAT/UNSAT only, no witness shaping (faster).
IlpResult ilp_feasible(const LinearIntSystem& sys, const IlpOptions& opts = {});

// Exact integer minimum / maximum of variable v over the integer points of
// sys; nullopt when infeasible. max returns nullopt also when unbounded (use
// lp_maximize to distinguish).
std::optional<Int> ilp_minimize_var(const LinearIntSystem& sys, int v, const IlpOptions& opts = {});

// Variables that receive a positive value in some N-solution of a homogeneous
// system. Valid by scaling: a rational nonnegative solution with x_v > 0
// clears to an integer one.
std::set<int> support(const LinearIntSystem& sys);

// An N-solution positive on every support variable and zero outside it.
std::vector<Int> full_hom_solution(const LinearIntSystem& sys);

// Linear set b + P* over Z^dim.
struct LinearSet {
  std::vector<long long> base;
  std::vector<std::vector<long long>> periods;  // duplicate-free

  int dim() const { return static_cast<int>(base.size()); }
  static LinearSet full_space(int dim);  // base 0, periods {+-e_i}
  bool is_full_space() const;
  bool operator==(const LinearSet&) const = default;
};

// v in b + P* decided exactly by ilp_solve.
bool linset_member(const std::vector<long long>& v, const LinearSet& ls);

}  // namespace gvas
