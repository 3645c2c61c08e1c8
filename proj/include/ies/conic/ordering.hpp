#pragma once

#include <vector>

namespace ies::conic {

/// Fill-reducing elimination order for a symmetric sparsity pattern.
/// Quotient-graph minimum degree with element absorption and approximate
/// external degrees. Input is the adjacency of the matrix graph (no
/// self-loops, both directions present). Returns perm where perm[k] is the
/// original index eliminated at step k. Ties break on the lower index, so the
/// ordering is deterministic.
std::vector<int> min_degree_order(int n, const std::vector<int>& adj_ptr,
                                  const std::vector<int>& adj_idx);

}  // namespace ies::conic
