// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Esparza-Euler-Kirchhoff systems over production counts, their homogeneous
// variant, and the constructive direction: realizing a production vector as
// an actual derivation.

#pragma once

#include "gvas/grammar.hpp"
#include "gvas/numeric.hpp"

namespace gvas {

enum class EekFlavor { Standard, Homogeneous };

// Builds eff_N . x = -1_S (Standard) or = 0 (Homogeneous) over variables
// xP[p]; with_pt adds terminal-count variables xT[t] and the coupling rows
// xT - eff_T . xP = 0. start overrides the grammar's start symbol.
LinearIntSystem build_eek(const WcnfGrammar& g, EekFlavor flavor, bool with_pt,
                          int start = -1);

std::string eek_var_p(const WcnfGrammar& g, int p);
std::string eek_var_t(const WcnfGrammar& g, int t);

struct Derivation {
  std::vector<int> steps;  // production indices, in application order
  ParseTree tree;          // the derivation tree; yield = final sentential form
};

// Constructive Theorem: given v >= 1 over productions with eff_N . v >= -1_S
// and only useful nonterminals, returns a derivation from S using each
// production exactly v[p] times. Expansion is leftmost; at each position the
// production with the most remaining budget that keeps the residual vector
// realizable is applied.
Derivation realize(const WcnfGrammar& g, const std::vector<long long>& v);

// Same for v >= 1 with eff_N . v = 0; the resulting sentential form contains
// exactly one nonterminal, the start symbol.
Derivation hom_realize(const WcnfGrammar& g, const std::vector<long long>& v);

// Parikh identities of the converse lemma: with S ->^sigma alpha,
// Parikh_N(alpha) = 1_S + eff_N . Parikh_P(sigma) and
// Parikh_T(alpha) = eff_T . Parikh_P(sigma).
bool check_converse(const WcnfGrammar& g, const std::vector<int>& sigma);

}  // namespace gvas
