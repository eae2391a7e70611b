#pragma once

#include <map>
#include <string>
#include <vector>

#include "gallery_sync/links.hpp"

namespace gsync {

struct GalleryEdge {
  double weight = 0.0;  // median link similarity
  std::vector<Link> links;
};

struct GalleryGraph {
  std::vector<std::string> nodes;  // gallery ids, manifest order
  std::map<GalleryPair, GalleryEdge> edges;

  const GalleryEdge* find_edge(const std::string& a, const std::string& b) const;
};

struct TreeStep {
  std::string parent;
  std::string child;
  GalleryPair edge;  // key into GalleryGraph::edges
};

struct SpanningTree {
  std::string root;
  std::vector<GalleryPair> edges;
  std::vector<TreeStep> traversal;  // breadth-first, parents before children
};

/// Median of an arbitrary list; mean of the middle two for even sizes.
double median(std::vector<double> values);

GalleryGraph build_graph(const std::vector<std::string>& gallery_ids, const LinkSet& links);
GalleryGraph build_graph(const Collection& collection, const LinkSet& links);

/// Kruskal on cost (1 - weight), i.e. the maximum-similarity spanning tree of
/// the root's component. Equal costs are taken in lexicographic pair order.
SpanningTree spanning_tree(const GalleryGraph& graph, const std::string& root);

/// Galleries outside the root's connected component, in node order.
std::vector<std::string> unreachable_galleries(const GalleryGraph& graph, const std::string& root);

std::string export_dot(const GalleryGraph& graph, const SpanningTree& tree);

}  // namespace gsync
