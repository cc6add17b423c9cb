#include "mind/graph/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace mind {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

const char* skip_space(const char* p, const char* end) {
  while (p != end && is_space(*p)) ++p;
  return p;
}

}  // namespace

EdgeListFile parse_edge_list(std::istream& in, const std::string& source) {
  EdgeListFile out;
  std::unordered_map<long long, NodeId> index;
  std::vector<Edge> edges;
  auto intern = [&](long long id) {
    auto [it, inserted] = index.try_emplace(id, static_cast<NodeId>(out.original_ids.size()));
    if (inserted) out.original_ids.push_back(id);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  std::size_t edge_lines = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const char* p = skip_space(line.data(), line.data() + line.size());
    const char* end = line.data() + line.size();
    if (p == end || *p == '#') continue;
    long long a = 0, b = 0;
    auto r1 = std::from_chars(p, end, a);
    const char* q = r1.ptr;
    bool ok = r1.ec == std::errc() && q != end && is_space(*q);
    if (ok) {
      q = skip_space(q, end);
      auto r2 = std::from_chars(q, end, b);
      ok = r2.ec == std::errc() && skip_space(r2.ptr, end) == end;
    }
    if (!ok) throw ParseError(source + ":" + std::to_string(lineno) + ": expected two integer node ids");
    ++edge_lines;
    const NodeId u = intern(a);
    const NodeId v = intern(b);
    if (u == v) {
      ++out.dropped_self_loops;
      continue;
    }
    edges.push_back({std::min(u, v), std::max(u, v)});
  }
  if (edge_lines == 0) throw ParseError(source + ": edge list is empty");

  std::sort(edges.begin(), edges.end(),
            [](const Edge& x, const Edge& y) { return x.u != y.u ? x.u < y.u : x.v < y.v; });
  const auto before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  out.dropped_duplicates = before - edges.size();
  out.graph = Graph::from_edges(out.original_ids.size(), edges);
  return out;
}

EdgeListFile load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_edge_list(in, path);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (const Edge& e : g.active_edges()) out << e.u << ' ' << e.v << '\n';
}

void write_edge_list(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_edge_list(out, g);
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace mind
