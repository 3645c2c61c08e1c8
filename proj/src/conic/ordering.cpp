#include "ies/conic/ordering.hpp"

#include <algorithm>
#include <queue>
#include <utility>

namespace ies::conic {

namespace {

struct HeapEntry {
  int degree;
  int node;
  bool operator>(const HeapEntry& o) const {
    if (degree != o.degree) return degree > o.degree;
    return node > o.node;
  }
};

}  // namespace

std::vector<int> min_degree_order(int n, const std::vector<int>& adj_ptr,
                                  const std::vector<int>& adj_idx) {
  std::vector<std::vector<int>> adj_var(n);   // live variable neighbours
  std::vector<std::vector<int>> adj_el(n);    // elements this variable belongs to
  std::vector<std::vector<int>> el_nodes(n);  // boundary of each element
  std::vector<char> alive(n, 1), el_alive(n, 0);
  std::vector<int> degree(n), w(n, 0), w_stamp(n, -1), mark(n, -1);

  for (int i = 0; i < n; ++i) {
    adj_var[i].assign(adj_idx.begin() + adj_ptr[i], adj_idx.begin() + adj_ptr[i + 1]);
    degree[i] = static_cast<int>(adj_var[i].size());
  }

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>> heap;
  for (int i = 0; i < n; ++i) heap.push({degree[i], i});

  std::vector<int> perm;
  perm.reserve(n);
  std::vector<int> lp;  // boundary of the pivot element

  for (int k = 0; k < n; ++k) {
    int p = -1;
    while (!heap.empty()) {
      HeapEntry e = heap.top();
      if (alive[e.node] && degree[e.node] == e.degree) {
        p = e.node;
        break;
      }
      heap.pop();
    }
    if (p < 0) break;  // defensive; all nodes should be reachable
    heap.pop();
    perm.push_back(p);
    alive[p] = 0;

    // Lp = (adj_var[p] ∪ boundaries of p's elements) \ {p, dead}
    lp.clear();
    const int stamp = p;  // unique per elimination
    mark[p] = stamp;
    for (int v : adj_var[p]) {
      if (alive[v] && mark[v] != stamp) {
        mark[v] = stamp;
        lp.push_back(v);
      }
    }
    for (int e : adj_el[p]) {
      if (!el_alive[e]) continue;
      for (int v : el_nodes[e]) {
        if (alive[v] && mark[v] != stamp) {
          mark[v] = stamp;
          lp.push_back(v);
        }
      }
      el_alive[e] = 0;  // absorbed into the new element
    }
    std::sort(lp.begin(), lp.end());

    el_nodes[p] = lp;
    el_alive[p] = 1;
    adj_var[p].clear();
    adj_var[p].shrink_to_fit();
    adj_el[p].clear();

    // |Le \ Lp| for every element touching Lp (compacting dead entries on first visit)
    for (int i : lp) {
      for (int e : adj_el[i]) {
        if (!el_alive[e]) continue;
        if (w_stamp[e] != p) {
          auto& nodes = el_nodes[e];
          nodes.erase(std::remove_if(nodes.begin(), nodes.end(),
                                     [&](int v) { return !alive[v]; }),
                      nodes.end());
          w[e] = static_cast<int>(nodes.size());
          w_stamp[e] = p;
        }
        w[e]--;
      }
    }

    const int lp_size = static_cast<int>(lp.size());
    for (int i : lp) {
      // drop neighbours now covered by the new element, and dead ones
      auto& av = adj_var[i];
      av.erase(std::remove_if(av.begin(), av.end(),
                              [&](int v) { return !alive[v] || mark[v] == stamp; }),
               av.end());
      // drop absorbed elements
      auto& ae = adj_el[i];
      int ext = 0;
      std::size_t out = 0;
      for (int e : ae) {
        if (!el_alive[e]) continue;
        if (w_stamp[e] == p && w[e] == 0) {
          el_alive[e] = 0;  // Le ⊆ Lp, absorb
          continue;
        }
        ae[out++] = e;
        ext += (w_stamp[e] == p) ? w[e] : static_cast<int>(el_nodes[e].size());
      }
      ae.resize(out);
      ae.push_back(p);

      int d = static_cast<int>(av.size()) + (lp_size - 1) + ext;
      d = std::min(d, n - k - 1);
      d = std::min(d, degree[i] + lp_size - 1);
      degree[i] = std::max(d, 0);
      heap.push({degree[i], i});
    }
  }
  return perm;
}

}  // namespace ies::conic
