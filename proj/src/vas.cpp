// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0

#include "gvas/vas.hpp"

#include <algorithm>

namespace gvas {

GenMarking to_generalized(const Marking& m) {
  GenMarking g;
  g.reserve(m.size());
  for (Value v : m) g.emplace_back(v);
  return g;
}

Marking to_concrete(const GenMarking& m) {
  Marking out;
  out.reserve(m.size());
  for (const auto& c : m) {
    if (c.is_omega()) throw contract_error("to_concrete: marking has an omega entry");
    out.push_back(c.finite());
  }
  return out;
}

std::set<int> omega_set(const GenMarking& m) {
  std::set<int> s;
  for (size_t i = 0; i < m.size(); ++i)
    if (m[i].is_omega()) s.insert(static_cast<int>(i));
  return s;
}

GenMarking zero_version(const GenMarking& m) {
  GenMarking out(m.size());
  for (size_t i = 0; i < m.size(); ++i)
    out[i] = m[i].is_omega() ? NatOmega::omega() : NatOmega(0);
  return out;
}

GenMarking omega_version(const std::set<int>& where, const GenMarking& m) {
  GenMarking out = m;
  for (int i : where) out.at(i) = NatOmega::omega();
  return out;
}

bool spec_leq(const GenMarking& a, const GenMarking& b) {
  if (a.size() != b.size()) throw contract_error("spec_leq: dimension mismatch");
  for (size_t i = 0; i < a.size(); ++i)
    if (!a[i].specializes(b[i])) return false;
  return true;
}

bool compatible(const GenMarking& a, const GenMarking& b) {
  if (a.size() != b.size()) throw contract_error("compatible: dimension mismatch");
  for (size_t i = 0; i < a.size(); ++i)
    if (!a[i].compatible(b[i])) return false;
  return true;
}

std::optional<GenMarking> meet(const GenMarking& a, const GenMarking& b) {
  if (!compatible(a, b)) return std::nullopt;
  GenMarking out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_omega())
      out[i] = b[i];
    else
      out[i] = a[i];
  }
  return out;
}

bool ideal_covers(const GenMarking& a, const GenMarking& b) {
  if (a.size() != b.size()) throw contract_error("ideal_covers: dimension mismatch");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_omega()) continue;
    if (b[i].is_omega() || b[i].finite() > a[i].finite()) return false;
  }
  return true;
}

Update run_effect(const Run& r, int dim) {
  Update eff(dim, 0);
  for (const auto& u : r.updates) {
    if (static_cast<int>(u.size()) != dim) throw contract_error("run_effect: dimension mismatch");
    for (int i = 0; i < dim; ++i) eff[i] += u[i];
  }
  return eff;
}

std::optional<GenMarking> fire(const GenMarking& m, const Run& r) {
  GenMarking cur = m;
  for (const auto& u : r.updates) {
    if (u.size() != cur.size()) throw contract_error("fire: dimension mismatch");
    for (size_t i = 0; i < cur.size(); ++i) {
      if (cur[i].is_omega()) continue;
      Value next = cur[i].finite() + u[i];
      if (next < 0) return std::nullopt;
      cur[i] = NatOmega(next);
    }
  }
  return cur;
}

std::optional<Marking> fire(const Marking& m, const Run& r) {
  auto g = fire(to_generalized(m), r);
  if (!g) return std::nullopt;
  return to_concrete(*g);
}

Marking hurdle(const Run& r, int dim) {
  Marking h(dim, 0);
  Marking prefix(dim, 0);
  for (const auto& u : r.updates) {
    for (int i = 0; i < dim; ++i) {
      prefix[i] += u[i];
      h[i] = std::max(h[i], -prefix[i]);
    }
  }
  return h;
}

Run reverse(const Run& r) {
  Run out;
  out.updates.reserve(r.updates.size());
  for (auto it = r.updates.rbegin(); it != r.updates.rend(); ++it) {
    Update u = *it;
    for (auto& x : u) x = -x;
    out.updates.push_back(std::move(u));
  }
  return out;
}

bool marking_less(const GenMarking& a, const GenMarking& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) {
      // finite values first, omega last
      if (a[i].is_omega() != b[i].is_omega()) return !a[i].is_omega();
      return a[i].finite() < b[i].finite();
    }
  }
  return false;
}

std::vector<GenMarking> ideal_decompose(std::vector<GenMarking> gens) {
  std::vector<GenMarking> out;
  for (size_t i = 0; i < gens.size(); ++i) {
    bool covered = false;
    for (size_t j = 0; j < gens.size() && !covered; ++j) {
      if (i == j) continue;
      if (ideal_covers(gens[j], gens[i])) {
        // break ties between equal generators by keeping the first
        covered = !(ideal_covers(gens[i], gens[j]) && i < j);
      }
    }
    if (!covered) out.push_back(gens[i]);
  }
  std::sort(out.begin(), out.end(), marking_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<long long> dc_type(const std::vector<GenMarking>& antichain) {
  if (antichain.empty()) return {};
  size_t dim = antichain[0].size();
  std::vector<long long> type(dim + 1, 0);
  for (const auto& g : antichain) {
    if (g.size() != dim) throw contract_error("dc_type: mixed dimensions");
    type[omega_set(g).size()] += 1;
  }
  return type;
}

std::vector<GenMarking> dc_boxes(const std::vector<GenMarking>& antichain, size_t cap) {
  std::vector<GenMarking> boxes;
  for (const auto& g : antichain) {
    std::vector<GenMarking> partial{GenMarking{}};
    for (const auto& c : g) {
      std::vector<GenMarking> next;
      for (const auto& p : partial) {
        if (c.is_omega()) {
          GenMarking q = p;
          q.push_back(NatOmega::omega());
          next.push_back(std::move(q));
        } else {
          for (Value v = 0; v <= c.finite(); ++v) {
            GenMarking q = p;
            q.push_back(NatOmega(v));
            next.push_back(std::move(q));
          }
        }
        if (next.size() > cap) throw budget_exhausted("dc_boxes: expansion too large");
      }
      partial = std::move(next);
    }
    boxes.insert(boxes.end(), partial.begin(), partial.end());
  }
  // Drop boxes subsumed by a box with more omegas and the same concrete part.
  std::vector<GenMarking> out;
  for (size_t i = 0; i < boxes.size(); ++i) {
    bool sub = false;
    for (size_t j = 0; j < boxes.size() && !sub; ++j) {
      if (i == j) continue;
      bool strict = false, inside = true;
      for (size_t k = 0; k < boxes[i].size(); ++k) {
        if (boxes[j][k].is_omega()) {
          if (!boxes[i][k].is_omega()) strict = true;
        } else if (boxes[i][k] != boxes[j][k]) {
          inside = false;
          break;
        }
      }
      sub = inside && strict;
    }
    if (!sub) out.push_back(boxes[i]);
  }
  std::sort(out.begin(), out.end(), marking_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string to_string(const GenMarking& m) {
  std::string s = "(";
  for (size_t i = 0; i < m.size(); ++i) {
    if (i) s += ",";
    s += m[i].str();
  }
  return s + ")";
}

std::string to_string(const Marking& m) {
  std::string s = "(";
  for (size_t i = 0; i < m.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(m[i]);
  }
  return s + ")";
}

std::string to_string(const Run& r) {
  std::string s = "[";
  for (size_t i = 0; i < r.updates.size(); ++i) {
    if (i) s += " ";
    s += to_string(r.updates[i]);
  }
  return s + "]";
}

}  // namespace gvas
