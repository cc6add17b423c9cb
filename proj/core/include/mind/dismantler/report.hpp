#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mind::dismantler {

/// Each AUC as a percentage of the reference method's AUC.
std::map<std::string, double> relative_auc(const std::map<std::string, double>& aucs, const std::string& reference);

struct ReportRow {
  std::string method;
  double auc = 0;        // at the evaluation threshold
  double full_auc = 0;   // whole recorded curve
  double relative = 0;
};

/// `method,auc,relative_auc` CSV.
void write_evaluation_csv(std::ostream& out, const std::vector<ReportRow>& rows);

/// Fixed-width table, one method per row, best AUC first, with a
/// threshold and a full-curve AUC column.
void write_table(std::ostream& out, std::vector<ReportRow> rows, const std::string& reference, double threshold);

}  // namespace mind::dismantler
