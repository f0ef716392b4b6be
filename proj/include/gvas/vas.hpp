// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0
//
// VAS firing semantics, generalized markings over N u {w}, the
// specialization order, meets, and downward-closed-set utilities.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gvas/numeric.hpp"

namespace gvas {

using Value = long long;
using Update = std::vector<Value>;
using Marking = std::vector<Value>;  // N^d

// One coordinate of a generalized marking: a natural number or omega.
// Arithmetic absorbs: w + z = w for every integer z.
class NatOmega {
 public:
  constexpr NatOmega() : v_(0) {}
  constexpr NatOmega(Value v) : v_(v) {}
  static constexpr NatOmega omega() { return NatOmega(kOmega, true); }

  bool is_omega() const { return v_ == kOmega; }
  Value finite() const { return v_; }  // only meaningful when !is_omega()

  NatOmega operator+(Value z) const {
    return is_omega() ? omega() : NatOmega(v_ + z);
  }
  bool operator==(const NatOmega& o) const = default;
  auto operator<=>(const NatOmega& o) const = default;  // w is the top element

  // Specialization order: k (= k, k (= w, w (= w.
  bool specializes(const NatOmega& o) const { return o.is_omega() || v_ == o.v_; }
  // Compatibility: equal, or at least one side omega.
  bool compatible(const NatOmega& o) const {
    return is_omega() || o.is_omega() || v_ == o.v_;
  }

  std::string str() const { return is_omega() ? "w" : std::to_string(v_); }

 private:
  constexpr NatOmega(Value v, bool) : v_(v) {}
  static constexpr Value kOmega = std::numeric_limits<Value>::max();
  Value v_;
};

using GenMarking = std::vector<NatOmega>;

GenMarking to_generalized(const Marking& m);
// Throws if any coordinate is omega.
Marking to_concrete(const GenMarking& m);

std::set<int> omega_set(const GenMarking& m);
GenMarking zero_version(const GenMarking& m);
GenMarking omega_version(const std::set<int>& where, const GenMarking& m);

// Componentwise specialization order a (= b.
bool spec_leq(const GenMarking& a, const GenMarking& b);
bool compatible(const GenMarking& a, const GenMarking& b);
// Largest common specialization; nullopt when incompatible.
std::optional<GenMarking> meet(const GenMarking& a, const GenMarking& b);

// Cover order of ideals: a's downward closure contains b's, i.e.
// Omega(a) >= Omega(b) and a >= b pointwise with w above everything.
bool ideal_covers(const GenMarking& a, const GenMarking& b);

struct Run {
  std::vector<Update> updates;

  int dim() const { return updates.empty() ? -1 : static_cast<int>(updates[0].size()); }
  size_t size() const { return updates.size(); }
};

Update run_effect(const Run& r, int dim);

// Fires every update in order; DISABLED (nullopt) when a non-omega entry
// would drop below zero.
std::optional<GenMarking> fire(const GenMarking& m, const Run& r);
std::optional<Marking> fire(const Marking& m, const Run& r);

// Least marking that enables the run: pointwise max over prefixes of the
// negated prefix effect, clamped at zero.
Marking hurdle(const Run& r, int dim);

// Reverses the order and flips the sign of every update.
Run reverse(const Run& r);

// The (=-and-<=-maximal elements generating the same downward closure,
// canonically sorted.
std::vector<GenMarking> ideal_decompose(std::vector<GenMarking> gens);

// Entry k counts generators with exactly k omega-entries. The vector has
// dim+1 entries for generators of dimension dim (all generators must agree).
std::vector<long long> dc_type(const std::vector<GenMarking>& antichain);

// Expands an antichain of ideal generators into point-times-N^k boxes: each
// concrete coordinate is enumerated from 0 to its value, subsumed boxes are
// dropped. Guarded by a size cap since the expansion is exponential.
std::vector<GenMarking> dc_boxes(const std::vector<GenMarking>& antichain,
                                 size_t cap = 1 << 16);

// Canonical total order used to sort marking sets deterministically.
bool marking_less(const GenMarking& a, const GenMarking& b);

std::string to_string(const GenMarking& m);
std::string to_string(const Marking& m);
std::string to_string(const Run& r);

}  // namespace gvas
