#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include "automate/graph.hpp"

#include <deque>
#include <set>

namespace automate::oracle {

/// Face pairs joined by face←loop←edge→loop→face, found by checking every
/// face pair against the part's boundary references.
inline std::vector<Relation> brute_force_face_pairs(const Part& part) {
  const int nf = static_cast<int>(part.faces().size());
  auto edges_of_face = [&](int f) {
    std::set<int> out;
    for (int l : part.loops_of_face(f))
      for (int e : part.edges_of_loop(l)) out.insert(e);
    return out;
  };
  std::vector<std::set<int>> edges(nf);
  for (int f = 0; f < nf; ++f) edges[f] = edges_of_face(f);
  std::vector<Relation> out;
  for (int f1 = 0; f1 < nf; ++f1)
    for (int f2 = f1 + 1; f2 < nf; ++f2)
      for (int e : edges[f1])
        if (edges[f2].count(e)) {
          out.emplace_back(f1, f2);
          break;
        }
  return out;
}

/// Breadth-first distance between two face nodes over all relations.
inline int face_distance(const StructuredBrepGraph& g, int f0, int f1) {
  const int nf = g.count(Tier::face), nl = g.count(Tier::loop), ne = g.count(Tier::edge);
  const int offset[4] = {0, nf, nf + nl, nf + nl + ne};
  std::vector<std::vector<int>> adj(g.node_count());
  auto link = [&](const std::vector<Relation>& rel, Tier s, Tier d) {
    for (auto [a, b] : rel) {
      adj[offset[static_cast<int>(s)] + a].push_back(offset[static_cast<int>(d)] + b);
      adj[offset[static_cast<int>(d)] + b].push_back(offset[static_cast<int>(s)] + a);
    }
  };
  link(g.vertex_edge, Tier::vertex, Tier::edge);
  link(g.edge_loop, Tier::edge, Tier::loop);
  link(g.loop_face, Tier::loop, Tier::face);
  link(g.face_face, Tier::face, Tier::face);
  std::vector<int> dist(g.node_count(), -1);
  std::deque<int> q{f0};
  dist[f0] = 0;
  while (!q.empty()) {
    const int n = q.front();
    q.pop_front();
    for (int m : adj[n])
      if (dist[m] < 0) {
        dist[m] = dist[n] + 1;
        q.push_back(m);
      }
  }
  return dist[f1];
}

}  // namespace automate::oracle
