// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "gvas/numeric.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace gvas {

int LinearIntSystem::add_var(const std::string& name, const Int& lower,
                             std::optional<Int> upper) {
  if (index_.count(name)) throw contract_error("duplicate variable: " + name);
  int v = static_cast<int>(names_.size());
  names_.push_back(name);
  index_[name] = v;
  lower_.push_back(lower);
  upper_.push_back(std::move(upper));
  for (auto& row : rows_) row.coef.emplace_back(0);
  return v;
}

int LinearIntSystem::var(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw contract_error("unknown variable: " + name);
  return it->second;
}

void LinearIntSystem::add_row(std::vector<Int> coef, Int rhs) {
  if (coef.size() != names_.size())
    throw contract_error("row width mismatch: " + std::to_string(coef.size()) +
                         " vs " + std::to_string(names_.size()));
  rows_.push_back(Row{std::move(coef), std::move(rhs)});
}

void LinearIntSystem::add_row(const std::vector<std::pair<int, Int>>& terms, Int rhs) {
  std::vector<Int> coef(names_.size(), Int(0));
  for (const auto& [v, c] : terms) coef.at(v) += c;
  add_row(std::move(coef), std::move(rhs));
}

void LinearIntSystem::set_fixed(int v, const Int& value) {
  lower_.at(v) = value;
  upper_.at(v) = value;
}
void LinearIntSystem::set_lower(int v, const Int& lo) { lower_.at(v) = lo; }
void LinearIntSystem::set_upper(int v, std::optional<Int> up) { upper_.at(v) = std::move(up); }

bool LinearIntSystem::homogeneous() const {
  for (const auto& row : rows_)
    if (row.rhs != 0) return false;
  for (const auto& lo : lower_)
    if (lo != 0) return false;
  return true;
}

bool LinearIntSystem::satisfied_by(const std::vector<Int>& x) const {
  if (x.size() != names_.size()) return false;
  for (size_t v = 0; v < x.size(); ++v) {
    if (x[v] < lower_[v]) return false;
    if (upper_[v] && x[v] > *upper_[v]) return false;
  }
  for (const auto& row : rows_) {
    Int acc(0);
    for (size_t v = 0; v < x.size(); ++v) acc += row.coef[v] * x[v];
    if (acc != row.rhs) return false;
  }
  return true;
}

namespace {

// Dense exact-rational simplex in standard form: maximize c.y subject to
// A y = b, y >= 0. Bland's rule throughout, so it cannot cycle.
class Simplex {
 public:
  // Builds the standard form from sys: y_v = x_v - lower(v); upper bounds
  // become slack rows.
  explicit Simplex(const LinearIntSystem& sys) : n_(sys.num_vars()), cols_(sys.num_vars()) {
    for (const auto& row : sys.rows()) {
      Rat rhs(row.rhs);
      std::vector<Rat> coef(n_);
      for (int v = 0; v < n_; ++v) {
        coef[v] = Rat(row.coef[v]);
        rhs -= Rat(row.coef[v] * sys.lower(v));
      }
      rows_.push_back(std::move(coef));
      rhs_.push_back(rhs);
    }
    for (int v = 0; v < n_; ++v) {
      if (!sys.upper(v)) continue;
      Int width = *sys.upper(v) - sys.lower(v);
      if (width < 0) { infeasible_bounds_ = true; return; }
      int s = add_col();
      std::vector<Rat> coef(cols_, Rat(0));
      coef[v] = 1;
      coef[s] = 1;
      rows_.push_back(std::move(coef));
      rhs_.push_back(Rat(width));
    }
    for (auto& row : rows_) row.resize(cols_, Rat(0));
  }

  // Phase 1. Returns false when infeasible.
  bool solve_feasibility() {
    if (infeasible_bounds_) return false;
    const int m = static_cast<int>(rows_.size());
    basis_.assign(m, -1);
    for (int i = 0; i < m; ++i) {
      if (rhs_[i] < 0) {
        for (auto& c : rows_[i]) c = -c;
        rhs_[i] = -rhs_[i];
      }
    }
    first_artificial_ = cols_;
    for (int i = 0; i < m; ++i) {
      int a = add_col();
      for (int r = 0; r < m; ++r) rows_[r].resize(cols_, Rat(0));
      rows_[i][a] = 1;
      basis_[i] = a;
    }
    // Price out w = -sum(artificials).
    obj_.assign(cols_, Rat(0));
    obj_val_ = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < first_artificial_; ++j) obj_[j] += rows_[i][j];
      obj_val_ -= rhs_[i];
    }
    run();
    if (obj_val_ < 0) return false;
    drive_out_artificials();
    return true;
  }

  // Phase 2 on the original variables of sys (objective indexed 0..n-1).
  LpResult optimize(const LinearIntSystem& sys, const std::vector<Rat>& objective) {
    if (!solve_feasibility()) return {LpResult::Status::Infeasible, Rat(0), {}, {}};
    obj_.assign(cols_, Rat(0));
    obj_val_ = 0;
    for (int v = 0; v < n_; ++v) obj_[v] = objective[v];
    const int m = static_cast<int>(rows_.size());
    for (int i = 0; i < m; ++i) {
      int b = basis_[i];
      if (obj_[b] == 0) continue;
      Rat f = obj_[b];
      for (int j = 0; j < cols_; ++j) obj_[j] -= f * rows_[i][j];
      obj_val_ += f * rhs_[i];
      obj_[b] = 0;
    }
    int unbounded_col = run();
    LpResult res;
    res.point = extract_point(sys);
    if (unbounded_col >= 0) {
      res.status = LpResult::Status::Unbounded;
      res.ray = extract_ray(unbounded_col);
      res.value = 0;
    } else {
      res.status = LpResult::Status::Optimal;
      Rat shift(0);
      for (int v = 0; v < n_; ++v) shift += objective[v] * Rat(sys.lower(v));
      res.value = obj_val_ + shift;
    }
    return res;
  }

  std::vector<Rat> extract_point(const LinearIntSystem& sys) const {
    std::vector<Rat> x(n_, Rat(0));
    const int m = static_cast<int>(rows_.size());
    for (int i = 0; i < m; ++i)
      if (basis_[i] < n_) x[basis_[i]] = rhs_[i];
    for (int v = 0; v < n_; ++v) x[v] += Rat(sys.lower(v));
    return x;
  }

  std::vector<Rat> extract_ray(int col) const {
    std::vector<Rat> ray(n_, Rat(0));
    if (col < n_) ray[col] = 1;
    const int m = static_cast<int>(rows_.size());
    for (int i = 0; i < m; ++i)
      if (basis_[i] < n_) ray[basis_[i]] = -rows_[i][col];
    return ray;
  }

 private:
  int add_col() { return cols_++; }

  bool col_allowed(int j) const {
    return first_artificial_ < 0 || j < first_artificial_ || !artificials_retired_;
  }

  // Bland's rule; returns -1 on optimality, else the entering column that
  // witnessed unboundedness.
  int run() {
    const int m = static_cast<int>(rows_.size());
    for (;;) {
      int enter = -1;
      for (int j = 0; j < cols_; ++j) {
        if (!col_allowed(j)) continue;
        if (obj_[j] > 0) { enter = j; break; }
      }
      if (enter < 0) return -1;
      int leave = -1;
      Rat best;
      for (int i = 0; i < m; ++i) {
        if (rows_[i][enter] <= 0) continue;
        Rat ratio = rhs_[i] / rows_[i][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return enter;  // unbounded
      pivot(leave, enter);
    }
  }

  void pivot(int row, int col) {
    Rat p = rows_[row][col];
    for (auto& c : rows_[row]) c /= p;
    rhs_[row] /= p;
    const int m = static_cast<int>(rows_.size());
    for (int i = 0; i < m; ++i) {
      if (i == row || rows_[i][col] == 0) continue;
      Rat f = rows_[i][col];
      for (int j = 0; j < cols_; ++j) rows_[i][j] -= f * rows_[row][j];
      rhs_[i] -= f * rhs_[row];
      rows_[i][col] = 0;
    }
    if (obj_[col] != 0) {
      Rat f = obj_[col];
      for (int j = 0; j < cols_; ++j) obj_[j] -= f * rows_[row][j];
      obj_val_ += f * rhs_[row];
      obj_[col] = 0;
    }
    basis_[row] = col;
  }

  void drive_out_artificials() {
    const int m = static_cast<int>(rows_.size());
    for (int i = 0; i < m; ++i) {
      if (basis_[i] < first_artificial_) continue;
      int piv = -1;
      for (int j = 0; j < first_artificial_; ++j)
        if (rows_[i][j] != 0) { piv = j; break; }
      if (piv >= 0) {
        pivot(i, piv);
      } else {
        // Redundant row; artificial stays basic at value zero, which is
        // harmless as long as it never reenters the objective.
      }
    }
    artificials_retired_ = true;
  }

  int n_;          // original variable count
  int cols_;
  std::vector<std::vector<Rat>> rows_;
  std::vector<Rat> rhs_;
  std::vector<Rat> obj_;
  Rat obj_val_ = 0;
  std::vector<int> basis_;
  int first_artificial_ = -1;
  bool artificials_retired_ = false;
  bool infeasible_bounds_ = false;
};

std::optional<std::vector<Rat>> lp_vertex(const LinearIntSystem& sys) {
  Simplex s(sys);
  if (!s.solve_feasibility()) return std::nullopt;
  return s.extract_point(sys);
}

}  // namespace

LpResult lp_maximize(const LinearIntSystem& sys, const std::vector<Rat>& objective) {
  if (static_cast<int>(objective.size()) != sys.num_vars())
    throw contract_error("objective width mismatch");
  Simplex s(sys);
  return s.optimize(sys, objective);
}

LpFeasibility lp_feasible(const LinearIntSystem& sys, const std::set<int>& strict_positive) {
  if (strict_positive.empty()) {
    auto pt = lp_vertex(sys);
    if (!pt) return {false, {}};
    return {true, *pt};
  }
  std::vector<std::vector<Rat>> witnesses;
  for (int v : strict_positive) {
    std::vector<Rat> obj(sys.num_vars(), Rat(0));
    obj.at(v) = 1;
    LpResult r = lp_maximize(sys, obj);
    if (r.status == LpResult::Status::Infeasible) return {false, {}};
    if (r.status == LpResult::Status::Optimal) {
      if (r.value <= 0) return {false, {}};
      witnesses.push_back(r.point);
    } else {
      std::vector<Rat> w = r.point;
      for (int i = 0; i < sys.num_vars(); ++i) w[i] += r.ray[i];
      witnesses.push_back(std::move(w));
    }
  }
  std::vector<Rat> avg(sys.num_vars(), Rat(0));
  Rat inv(1, static_cast<unsigned long>(witnesses.size()));
  for (const auto& w : witnesses)
    for (int i = 0; i < sys.num_vars(); ++i) avg[i] += w[i] * inv;
  return {true, avg};
}

namespace {

// A-priori cap on some minimal solution of an integer-feasible system; only
// used to make branch-and-bound complete on variables without upper bounds.
Int completeness_cap(const LinearIntSystem& sys) {
  Int amax(1);
  for (const auto& row : sys.rows()) {
    for (const auto& c : row.coef) amax = std::max(amax, Int(abs(c)));
    amax = std::max(amax, Int(abs(row.rhs)));
  }
  for (int v = 0; v < sys.num_vars(); ++v) {
    amax = std::max(amax, Int(abs(sys.lower(v))));
    if (sys.upper(v)) amax = std::max(amax, Int(abs(*sys.upper(v))));
  }
  long m = static_cast<long>(sys.rows().size());
  Int base = Int(m + 2) * amax + 2;
  Int cap;
  mpz_pow_ui(cap.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(2 * m + 2));
  cap *= (sys.num_vars() + m + 2);
  return cap;
}

struct BnbNode {
  std::vector<Int> lo;
  std::vector<std::optional<Int>> up;
};

LinearIntSystem with_bounds(const LinearIntSystem& sys, const BnbNode& nd) {
  LinearIntSystem s = sys;
  for (int v = 0; v < s.num_vars(); ++v) {
    s.set_lower(v, nd.lo[v]);
    s.set_upper(v, nd.up[v]);
  }
  return s;
}

// Integer feasibility search; returns a witness vertex if one exists.
std::optional<std::vector<Int>> bnb_feasible(const LinearIntSystem& sys,
                                             const IlpOptions& opts, long& nodes) {
  Int cap = completeness_cap(sys);
  BnbNode root;
  for (int v = 0; v < sys.num_vars(); ++v) {
    root.lo.push_back(sys.lower(v));
    root.up.push_back(sys.upper(v) ? *sys.upper(v) : std::max(cap, sys.lower(v)));
  }
  std::vector<BnbNode> stack{root};
  while (!stack.empty()) {
    if (++nodes > opts.node_budget)
      throw budget_exhausted("ilp node budget exhausted after " +
                             std::to_string(nodes - 1) + " nodes");
    BnbNode nd = std::move(stack.back());
    stack.pop_back();
    auto pt = lp_vertex(with_bounds(sys, nd));
    if (!pt) continue;
    int frac = -1;
    for (int v = 0; v < sys.num_vars(); ++v)
      if (!rat_is_int((*pt)[v])) { frac = v; break; }
    if (frac < 0) {
      std::vector<Int> w;
      for (const auto& q : *pt) w.push_back(q.get_num());
      return w;
    }
    Int fl = rat_floor((*pt)[frac]);
    BnbNode left = nd, right = nd;
    left.up[frac] = fl;
    right.lo[frac] = fl + 1;
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));  // explore smaller values first
  }
  return std::nullopt;
}

// Exact integer minimum of x_v; assumes integer-feasibility already known.
Int bnb_minimize(const LinearIntSystem& sys, int v, const std::vector<Int>& incumbent0,
                 const IlpOptions& opts, long& nodes) {
  Int best = incumbent0[v];
  Int cap = completeness_cap(sys);
  BnbNode root;
  for (int u = 0; u < sys.num_vars(); ++u) {
    root.lo.push_back(sys.lower(u));
    root.up.push_back(sys.upper(u) ? *sys.upper(u) : std::max(cap, sys.lower(u)));
  }
  std::vector<Rat> obj(sys.num_vars(), Rat(0));
  obj[v] = -1;  // maximize -x_v
  std::vector<BnbNode> stack{root};
  while (!stack.empty()) {
    if (++nodes > opts.node_budget)
      throw budget_exhausted("ilp node budget exhausted in minimize");
    BnbNode nd = std::move(stack.back());
    stack.pop_back();
    LinearIntSystem local = with_bounds(sys, nd);
    LpResult r = lp_maximize(local, obj);
    if (r.status == LpResult::Status::Infeasible) continue;
    // r is Optimal: -x_v is bounded above by 0 shifted, x_v >= lower bound.
    Rat lp_min = -r.value;
    if (rat_ceil(lp_min) >= best) continue;
    const std::vector<Rat>& pt = r.point;
    int frac = -1;
    for (int u = 0; u < sys.num_vars(); ++u)
      if (!rat_is_int(pt[u])) { frac = u; break; }
    if (frac < 0) {
      best = std::min(best, Int(pt[v].get_num()));
      continue;
    }
    Int fl = rat_floor(pt[frac]);
    BnbNode left = nd, right = nd;
    left.up[frac] = fl;
    right.lo[frac] = fl + 1;
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));
  }
  return best;
}

}  // namespace

IlpResult ilp_feasible(const LinearIntSystem& sys, const IlpOptions& opts) {
  IlpResult res;
  res.nodes = 0;
  auto w = bnb_feasible(sys, opts, res.nodes);
  if (!w) {
    res.status = IlpResult::Status::Unsat;
    return res;
  }
  res.status = IlpResult::Status::Sat;
  res.witness = std::move(*w);
  return res;
}

IlpResult ilp_solve(const LinearIntSystem& sys, const IlpOptions& opts) {
  IlpResult res = ilp_feasible(sys, opts);
  if (res.status == IlpResult::Status::Unsat) return res;
  // Shape the witness: minimize variables from last-declared to first, so the
  // result is lex-least under reversed variable significance.
  LinearIntSystem fixed = sys;
  std::vector<Int> incumbent = res.witness;
  for (int v = sys.num_vars() - 1; v >= 0; --v) {
    Int m = bnb_minimize(fixed, v, incumbent, opts, res.nodes);
    fixed.set_fixed(v, m);
    auto w = bnb_feasible(fixed, opts, res.nodes);
    assert(w);
    incumbent = std::move(*w);
  }
  res.witness = incumbent;
  assert(sys.satisfied_by(res.witness));
  return res;
}

std::optional<Int> ilp_minimize_var(const LinearIntSystem& sys, int v, const IlpOptions& opts) {
  long nodes = 0;
  auto w = bnb_feasible(sys, opts, nodes);
  if (!w) return std::nullopt;
  return bnb_minimize(sys, v, *w, opts, nodes);
}

std::set<int> support(const LinearIntSystem& sys) {
  if (!sys.homogeneous())
    throw contract_error("support requires a homogeneous system");
  std::set<int> supp;
  for (int v = 0; v < sys.num_vars(); ++v) {
    std::vector<Rat> obj(sys.num_vars(), Rat(0));
    obj[v] = 1;
    LpResult r = lp_maximize(sys, obj);
    if (r.status == LpResult::Status::Unbounded ||
        (r.status == LpResult::Status::Optimal && r.value > 0))
      supp.insert(v);
  }
  return supp;
}

std::vector<Int> full_hom_solution(const LinearIntSystem& sys) {
  std::set<int> supp = support(sys);
  std::vector<Rat> acc(sys.num_vars(), Rat(0));
  for (int v : supp) {
    std::vector<Rat> obj(sys.num_vars(), Rat(0));
    obj[v] = 1;
    LpResult r = lp_maximize(sys, obj);
    std::vector<Rat> w = r.point;
    if (r.status == LpResult::Status::Unbounded)
      for (int i = 0; i < sys.num_vars(); ++i) w[i] += r.ray[i];
    for (int i = 0; i < sys.num_vars(); ++i) acc[i] += w[i];
  }
  Int lcm(1);
  for (const auto& q : acc) {
    Int den = q.get_den();
    Int g;
    mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
    lcm = lcm / g * den;
  }
  std::vector<Int> out;
  for (const auto& q : acc) out.push_back(Int(q.get_num() * (lcm / q.get_den())));
  return out;
}

LinearSet LinearSet::full_space(int dim) {
  LinearSet ls;
  ls.base.assign(dim, 0);
  for (int i = 0; i < dim; ++i) {
    std::vector<long long> p(dim, 0), n(dim, 0);
    p[i] = 1;
    n[i] = -1;
    ls.periods.push_back(p);
    ls.periods.push_back(n);
  }
  return ls;
}

bool LinearSet::is_full_space() const {
  for (long long b : base)
    if (b != 0) return false;
  std::set<std::pair<int, int>> units;
  for (const auto& p : periods) {
    int nz = -1;
    for (int i = 0; i < dim(); ++i) {
      if (p[i] == 0) continue;
      if (nz >= 0 || (p[i] != 1 && p[i] != -1)) return false;
      nz = i;
    }
    if (nz < 0) return false;
    units.insert({nz, static_cast<int>(p[nz])});
  }
  for (int i = 0; i < dim(); ++i)
    if (!units.count({i, 1}) || !units.count({i, -1})) return false;
  return true;
}

bool linset_member(const std::vector<long long>& v, const LinearSet& ls) {
  if (static_cast<int>(v.size()) != ls.dim())
    throw contract_error("linset_member: dimension mismatch");
  LinearIntSystem sys;
  for (size_t p = 0; p < ls.periods.size(); ++p)
    sys.add_var("c" + std::to_string(p));
  for (int i = 0; i < ls.dim(); ++i) {
    std::vector<Int> coef;
    for (const auto& p : ls.periods) coef.emplace_back(p[i]);
    sys.add_row(std::move(coef), Int(v[i]) - Int(ls.base[i]));
  }
  return ilp_feasible(sys).status == IlpResult::Status::Sat;
}

}  // namespace gvas
