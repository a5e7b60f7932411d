#include "report.hpp"

#include "artifact.hpp"
#include "config.hpp"

#include <algorithm>
#include <iomanip>

namespace geocli {

namespace {

std::string horizon_text(const Json& params) {
  if (!params.contains("T")) return {};
  const Json& t = params.at("T");
  if (t.is_string()) return t.get<std::string>();
  return fmt_double(t.get<double>(), 4);
}

std::string summarize_certificate(const Json& doc) {
  std::string space = doc.at("space").at("kind").get<std::string>();
  std::string hz = horizon_text(doc.at("parameters"));
  if (space == "apartment") {
    return "blocked: " + std::to_string(doc.at("targets").size()) +
           " targets via " + std::to_string(doc.at("types").size()) +
           " midpoint types (horizon " + hz + ")";
  }
  if (!doc.at("blocked").get<bool>()) {
    return "not blocked: ray " +
           std::to_string(doc.at("unblocked_ray").get<std::size_t>()) + " escapes";
  }
  std::string line = "b(x,y) <= " +
                     std::to_string(doc.at("upper_bound").get<std::size_t>()) +
                     " (horizon " + hz + ")";
  if (doc.contains("lower_bound"))
    line += ", lower bound " +
            std::to_string(doc.at("lower_bound").get<std::size_t>());
  return line;
}

std::string summarize_classification(const Json& doc) {
  return doc.at("verdict").get<std::string>() + ", m_T = " +
         std::to_string(doc.at("light_count").get<std::size_t>());
}

std::string summarize_entropy(const Json& doc) {
  std::string line =
      "estimate " + fmt_double(doc.at("estimate").at("slope").get<double>(), 4);
  if (doc.contains("oracle"))
    line += " vs oracle " + fmt_double(doc.at("oracle").get<double>(), 4);
  return line;
}

std::string summarize_enumeration(const Json& doc) {
  std::string hz = horizon_text(doc.at("parameters"));
  if (doc.value("continuum", false)) return "continuum of rays (horizon " + hz + ")";
  std::string what =
      doc.at("space").at("kind") == "apartment" ? " orbit targets" : " light rays";
  return std::to_string(doc.at("count").get<std::size_t>()) + what + " (horizon " +
         hz + ")";
}

std::string summarize_scan(const Json& doc) {
  std::string line = std::to_string(doc.at("violations").size()) + " violations in " +
                     std::to_string(doc.at("pairs_examined").get<std::size_t>()) +
                     " pairs (diameter " +
                     fmt_double(doc.at("diameter").get<double>(), 4) + ")";
  std::size_t unresolved = doc.value("pairs_unresolved", std::size_t{0});
  if (unresolved > 0) line += ", " + std::to_string(unresolved) + " unresolved";
  return line;
}

std::string check_column(const Json& doc, bool& pass) {
  const Json& checks = doc.at("checks");
  if (checks.empty()) return "-";
  std::string failed;
  for (const Json& c : checks) {
    if (c.at("pass").get<bool>()) continue;
    if (!failed.empty()) failed += ",";
    failed += c.at("name").get<std::string>();
  }
  if (failed.empty()) return "ok";
  pass = false;
  return "FAIL " + failed;
}

bool looks_like_growth_csv(const std::string& bytes) {
  return bytes.rfind("# geolab.growth.v1", 0) == 0;
}

ReportRow csv_row(const std::string& path, const std::string& bytes) {
  geolab::GrowthSeries s = rebuild_series_csv(bytes, path);
  ReportRow row;
  row.path = path;
  row.kind = "growth";
  row.summary = "T = " + geolab::rational_str(s.horizons.back()) +
                ": n = " + int_str(s.n.back()) + ", m = " + int_str(s.m.back());
  row.checks = "-";
  return row;
}

}  // namespace

ReportRow report_row(const std::string& path) {
  std::string bytes = read_text_file(path);
  if (looks_like_growth_csv(bytes)) return csv_row(path, bytes);

  Json doc;
  try {
    doc = Json::parse(bytes);
  } catch (const std::exception&) {
    throw CliError("artifact", path + ": not a growth CSV or JSON artifact");
  }
  if (doc.value("schema", "") != "geolab.artifact.v1")
    throw CliError("artifact", path + ": missing geolab.artifact.v1 tag");

  ReportRow row;
  row.path = path;
  try {
    row.kind = doc.at("kind").get<std::string>();
    if (row.kind == "certificate")
      row.summary = summarize_certificate(doc);
    else if (row.kind == "classification")
      row.summary = summarize_classification(doc);
    else if (row.kind == "entropy") {
      geolab::validate_series(rebuild_series_json(doc));
      row.summary = summarize_entropy(doc);
    } else if (row.kind == "enumeration")
      row.summary = summarize_enumeration(doc);
    else if (row.kind == "scan")
      row.summary = summarize_scan(doc);
    else
      throw CliError("artifact", path + ": unknown kind '" + row.kind + "'");
    row.checks = check_column(doc, row.pass);
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError("artifact", path + ": " + e.what());
  }
  return row;
}

int run_report(const std::vector<std::string>& paths, std::ostream& os) {
  std::vector<ReportRow> rows;
  rows.reserve(paths.size());
  for (const std::string& p : paths) rows.push_back(report_row(p));

  std::size_t w_path = 8, w_kind = 4, w_summary = 7;
  for (const ReportRow& r : rows) {
    w_path = std::max(w_path, r.path.size());
    w_kind = std::max(w_kind, r.kind.size());
    w_summary = std::max(w_summary, r.summary.size());
  }
  auto line = [&](const std::string& a, const std::string& b, const std::string& c,
                  const std::string& d) {
    os << std::left << std::setw(static_cast<int>(w_path)) << a << "  "
       << std::setw(static_cast<int>(w_kind)) << b << "  "
       << std::setw(static_cast<int>(w_summary)) << c << "  " << d << "\n";
  };
  line("artifact", "kind", "summary", "checks");
  bool all_pass = true;
  for (const ReportRow& r : rows) {
    line(r.path, r.kind, r.summary, r.checks);
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace geocli
