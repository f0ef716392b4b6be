// Copyright (c) gvaskit contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Constructive wide tree theorem: arrange k copies of a homogeneous
// production vector in a parse tree whose height and whose number of
// simultaneously incomplete copies grow logarithmically in k.

#pragma once

#include "gvas/eek.hpp"
#include "gvas/grammar.hpp"

namespace gvas {

struct ProvenancedTree {
  ParseTree tree;                 // yield is w1 . A . w2 with one nonterminal
  int copies = 0;                 // k
  std::vector<int> leaf_copy;     // copy index (1-based) per terminal leaf, yield order
  std::vector<long long> parikh;  // production Parikh vector of the tree
};

// Height bound ceil(1+log2 k) * ||v|| and order bound ceil(1+log2 k); v >= 1
// must solve homEEK and the grammar must be non-linear, strongly connected,
// and fully useful.
ProvenancedTree build_wide_tree(const WcnfGrammar& g, const std::vector<long long>& v, int k);

// Generalization used by the iteration lemma: a mixed list of homogeneous
// vectors, one copy each, arranged with the same recursion. copies = list
// size; copy i uses vectors[i].
ProvenancedTree build_wide_tree_multi(const WcnfGrammar& g,
                                      const std::vector<std::vector<long long>>& vectors);

// Maximum over yield cuts of the number of copies with terminal leaves on
// both sides of the cut.
int order_of(const ProvenancedTree& t);

long long wide_tree_height_bound(const std::vector<long long>& v, int k);
int wide_tree_order_bound(int k);

// DOT rendering with one color class per provenance copy.
std::string wide_tree_dot(const WcnfGrammar& g, const ProvenancedTree& t);

}  // namespace gvas
