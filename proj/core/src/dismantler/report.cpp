#include "mind/dismantler/report.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "mind/common.hpp"

namespace mind::dismantler {

std::map<std::string, double> relative_auc(const std::map<std::string, double>& aucs, const std::string& reference) {
  auto it = aucs.find(reference);
  require(it != aucs.end(), "relative_auc: reference method '" + reference + "' missing");
  require(it->second > 0.0, "relative_auc: reference AUC must be positive");
  std::map<std::string, double> out;
  for (const auto& [method, auc] : aucs) out[method] = auc * 100.0 / it->second;
  return out;
}

void write_evaluation_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "method,auc,relative_auc\n" << std::setprecision(10);
  for (const auto& r : rows) out << r.method << ',' << r.auc << ',' << r.relative << '\n';
}

void write_table(std::ostream& out, std::vector<ReportRow> rows, const std::string& reference, double threshold) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) { return a.auc < b.auc; });
  std::size_t w = 6;
  for (const auto& r : rows) w = std::max(w, r.method.size());
  out << std::left << std::setw(static_cast<int>(w)) << "Method" << std::right << "  " << std::setw(12)
      << ("AUC@" + std::to_string(threshold).substr(0, 4)) << "  " << std::setw(12) << "AUC(full)" << "  "
      << std::setw(10) << "Relative" << '\n';
  out << std::string(w + 42, '-') << '\n';
  out << std::fixed;
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(w)) << r.method << std::right << "  " << std::setw(12)
        << std::setprecision(4) << r.auc << "  " << std::setw(12) << r.full_auc << "  " << std::setw(10)
        << std::setprecision(2) << r.relative << (r.method == reference ? " *" : "") << '\n';
  }
  out.unsetf(std::ios::fixed);
}

}  // namespace mind::dismantler
