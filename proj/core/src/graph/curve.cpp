#include "mind/graph/curve.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <tuple>

#include "mind/graph/union_find.hpp"

namespace mind {

double DismantlingCurve::full_auc() const {
  double s = 0.0;
  for (double f : lcc_fractions) s += f;
  return s;
}

double DismantlingCurve::auc_at(double t) const { return thresholded_auc(lcc_fractions, t).first; }

std::pair<double, std::size_t> thresholded_auc(std::span<const double> fractions, double threshold) {
  double auc = 0.0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    auc += fractions[i];
    if (fractions[i] < threshold) return {auc, i};
  }
  return {auc, fractions.size()};
}

DismantlingCurve auc_for_order(const Graph& g, std::span<const NodeId> order, double threshold) {
  const std::size_t n = g.num_nodes();
  std::vector<std::uint8_t> present(g.mask().begin(), g.mask().end());
  for (NodeId v : order) {
    require(v < n, "auc_for_order: node id out of range");
    if (!present[v]) {
      throw ContractError(g.is_active(v) ? "auc_for_order: duplicate node " + std::to_string(v)
                                         : "auc_for_order: node " + std::to_string(v) + " is not active");
    }
    present[v] = 0;
  }

  DismantlingCurve curve;
  curve.removal_order.assign(order.begin(), order.end());
  curve.n0 = g.num_active();
  curve.threshold = threshold;
  if (order.empty() || curve.n0 == 0) {
    curve.terminated_at = 0;
    return curve;
  }

  UnionFind uf(n);
  std::size_t n_present = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (!present[v]) continue;
    ++n_present;
    for (NodeId u : g.neighbors(v))
      if (u > v && present[u]) uf.unite(u, v);
  }

  std::vector<std::size_t> sizes(order.size());
  for (std::size_t i = order.size(); i-- > 0;) {
    sizes[i] = n_present > 0 ? uf.max_size() : 0;
    const NodeId v = order[i];
    present[v] = 1;
    ++n_present;
    for (NodeId u : g.neighbors(v))
      if (present[u]) uf.unite(u, v);
  }

  const double n0 = static_cast<double>(curve.n0);
  curve.lcc_fractions.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    curve.lcc_fractions[i] = static_cast<double>(sizes[i]) / n0;
  std::tie(curve.auc, curve.terminated_at) = thresholded_auc(curve.lcc_fractions, threshold);
  return curve;
}

void write_curve_csv(std::ostream& out, const DismantlingCurve& curve, std::span<const long long> labels) {
  out << "step,node,lcc_fraction\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const NodeId v = curve.removal_order[i];
    out << i << ',';
    if (labels.empty())
      out << v;
    else
      out << labels[v];
    out << ',' << curve.lcc_fractions[i] << '\n';
  }
  out << "# auc=" << curve.auc << '\n';
}

void write_curve_csv(const std::string& path, const DismantlingCurve& curve, std::span<const long long> labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_curve_csv(out, curve, labels);
  if (!out) throw IoError("failed writing " + path);
}

CurveFile read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  CurveFile file;
  std::string line;
  std::size_t lineno = 0;
  bool header = false, have_auc = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# auc=", 0) == 0) {
      std::istringstream v(line.substr(6));
      if (!(v >> file.auc)) throw ParseError(path + ":" + std::to_string(lineno) + ": bad auc trailer");
      have_auc = true;
      continue;
    }
    if (line[0] == '#') continue;
    if (!header) {
      if (line != "step,node,lcc_fraction")
        throw ParseError(path + ":" + std::to_string(lineno) + ": expected header step,node,lcc_fraction");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string step, node, frac;
    if (!std::getline(row, step, ',') || !std::getline(row, node, ',') || !std::getline(row, frac))
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
    try {
      file.nodes.push_back(std::stoll(node));
      file.lcc_fractions.push_back(std::stod(frac));
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row");
    }
  }
  if (!header) throw ParseError(path + ": missing header");
  if (!have_auc) throw ParseError(path + ": missing '# auc=' trailer");
  return file;
}

}  // namespace mind
