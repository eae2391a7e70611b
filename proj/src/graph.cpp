#include "gallery_sync/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "gallery_sync/error.hpp"

namespace gsync {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("gallery-graph", msg); }

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

GalleryPair sorted_pair(const GalleryPair& p) {
  return p.first < p.second ? p : GalleryPair{p.second, p.first};
}

std::unordered_map<std::string, std::size_t> node_index(const GalleryGraph& g) {
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) idx.emplace(g.nodes[i], i);
  return idx;
}

/// Adjacency restricted to `edges`, neighbours sorted by id.
std::map<std::string, std::vector<std::pair<std::string, GalleryPair>>> adjacency(
    const std::vector<GalleryPair>& edges) {
  std::map<std::string, std::vector<std::pair<std::string, GalleryPair>>> adj;
  for (const auto& e : edges) {
    adj[e.first].emplace_back(e.second, e);
    adj[e.second].emplace_back(e.first, e);
  }
  for (auto& [node, list] : adj) std::sort(list.begin(), list.end());
  return adj;
}

std::set<std::string> component_of(const GalleryGraph& graph, const std::string& root) {
  std::vector<GalleryPair> all;
  for (const auto& [key, edge] : graph.edges) all.push_back(key);
  auto adj = adjacency(all);
  std::set<std::string> seen{root};
  std::deque<std::string> queue{root};
  while (!queue.empty()) {
    auto node = queue.front();
    queue.pop_front();
    for (const auto& [next, edge] : adj[node])
      if (seen.insert(next).second) queue.push_back(next);
  }
  return seen;
}

}  // namespace

const GalleryEdge* GalleryGraph::find_edge(const std::string& a, const std::string& b) const {
  if (auto it = edges.find({a, b}); it != edges.end()) return &it->second;
  if (auto it = edges.find({b, a}); it != edges.end()) return &it->second;
  return nullptr;
}

double median(std::vector<double> values) {
  if (values.empty()) fail("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

GalleryGraph build_graph(const std::vector<std::string>& gallery_ids, const LinkSet& links) {
  GalleryGraph g;
  g.nodes = gallery_ids;
  for (const auto& [pair, list] : links) {
    if (list.empty()) continue;
    std::vector<double> sims;
    sims.reserve(list.size());
    for (const auto& l : list) sims.push_back(l.similarity);
    g.edges[pair] = GalleryEdge{median(std::move(sims)), list};
  }
  return g;
}

GalleryGraph build_graph(const Collection& collection, const LinkSet& links) {
  std::vector<std::string> ids;
  for (const auto& gal : collection.galleries) ids.push_back(gal.id);
  return build_graph(ids, links);
}

SpanningTree spanning_tree(const GalleryGraph& graph, const std::string& root) {
  const auto idx = node_index(graph);
  if (!idx.count(root)) fail("root gallery '" + root + "' is not a graph node");

  struct Ranked {
    double cost;
    GalleryPair lexical;  // tie-break key
    GalleryPair key;
  };
  std::vector<Ranked> order;
  for (const auto& [key, edge] : graph.edges) order.push_back({1.0 - edge.weight, sorted_pair(key), key});
  std::sort(order.begin(), order.end(), [](const Ranked& a, const Ranked& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.lexical < b.lexical;
  });

  DisjointSets sets(graph.nodes.size());
  std::vector<GalleryPair> forest;
  for (const auto& r : order)
    if (sets.unite(idx.at(r.key.first), idx.at(r.key.second))) forest.push_back(r.key);

  SpanningTree tree;
  tree.root = root;
  const std::size_t root_set = sets.find(idx.at(root));
  for (const auto& e : forest)
    if (sets.find(idx.at(e.first)) == root_set) tree.edges.push_back(e);

  auto adj = adjacency(tree.edges);
  std::set<std::string> seen{root};
  std::deque<std::string> queue{root};
  while (!queue.empty()) {
    auto node = queue.front();
    queue.pop_front();
    for (const auto& [next, edge] : adj[node]) {
      if (!seen.insert(next).second) continue;
      tree.traversal.push_back({node, next, edge});
      queue.push_back(next);
    }
  }
  return tree;
}

std::vector<std::string> unreachable_galleries(const GalleryGraph& graph, const std::string& root) {
  const auto reach = component_of(graph, root);
  std::vector<std::string> out;
  for (const auto& n : graph.nodes)
    if (!reach.count(n)) out.push_back(n);
  return out;
}

std::string export_dot(const GalleryGraph& graph, const SpanningTree& tree) {
  std::set<GalleryPair> in_tree;
  for (const auto& e : tree.edges) in_tree.insert(sorted_pair(e));
  std::ostringstream out;
  out << "graph galleries {\n";
  for (const auto& n : graph.nodes) {
    out << "  \"" << n << "\"";
    if (n == tree.root) out << " [shape=circle, style=filled, fillcolor=orange]";
    out << ";\n";
  }
  for (const auto& [key, edge] : graph.edges) {
    out << "  \"" << key.first << "\" -- \"" << key.second << "\" [label=\"" << edge.weight << "\"";
    if (in_tree.count(sorted_pair(key))) out << ", penwidth=3, color=blue";
    else out << ", style=dashed, color=gray";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace gsync
