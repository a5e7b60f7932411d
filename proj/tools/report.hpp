#pragma once

// Reads artifacts back and prints one aligned table row per file. The exit
// code folds in every embedded check so a report over a directory of runs
// doubles as a regression gate.

#include <ostream>
#include <string>
#include <vector>

namespace geocli {

struct ReportRow {
  std::string path;
  std::string kind;
  std::string summary;
  std::string checks;  // "ok", "-", or "FAIL name[,name...]"
  bool pass = true;
};

// Loads one artifact (JSON or growth CSV) and summarizes it. Throws CliError
// on unreadable or malformed files.
ReportRow report_row(const std::string& path);

// Prints the table; returns 0 when every check passed, 1 otherwise.
int run_report(const std::vector<std::string>& paths, std::ostream& os);

}  // namespace geocli
