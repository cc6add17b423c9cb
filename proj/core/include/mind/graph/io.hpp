#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mind/graph/graph.hpp"

namespace mind {

/// Result of reading a whitespace-separated edge list. Ids are compacted to
/// 0..n-1 in order of first appearance; `original_ids[i]` is the id in the file.
struct EdgeListFile {
  Graph graph;
  std::vector<long long> original_ids;
  std::size_t dropped_self_loops = 0;
  std::size_t dropped_duplicates = 0;
};

/// Throws ParseError naming the line for malformed input, and for a file
/// without any edge line. Lines starting with '#' are comments.
EdgeListFile load_edge_list(const std::string& path);
EdgeListFile parse_edge_list(std::istream& in, const std::string& source = "<stream>");

void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(const std::string& path, const Graph& g);

}  // namespace mind
