#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gevflow/harness.hpp"

namespace gevflow::harness {

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Table read_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("report: cannot read " + file.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("report: " + file.string() + " is empty");
  t.header = split(line);
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw std::runtime_error("report: " + file.string() + " line " + std::to_string(n) +
                               " has " + std::to_string(cells.size()) + " fields, expected " +
                               std::to_string(t.header.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str())
        throw std::runtime_error("report: " + file.string() + " line " + std::to_string(n) +
                                 ": not a number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string g(double v, int prec = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::vector<fs::path> report_run(const fs::path& dir) {
  const Table t = read_csv(dir / "series.csv");
  if (t.rows.empty()) throw std::runtime_error("report: " + (dir / "series.csv").string() + " has no samples");
  std::vector<fs::path> written;

  // Columns shown in the summary table, when present.
  const std::vector<std::string> shown = {"t", "L2.u", "E_s.weighted.u.B_s",
                                          "E_s.composite_short", "E_s.composite_full",
                                          "E1.composite", "max_vertical_mean", "div.state"};
  std::vector<int> cols;
  for (const auto& name : shown)
    if (int c = t.column(name); c >= 0) cols.push_back(c);

  const fs::path summary = dir / "summary.txt";
  {
    std::ofstream os(summary);
    os << "run: " << dir.string() << "\nsamples: " << t.rows.size() << "\n\n";
    for (int c : cols) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%-22s", t.header[c].c_str());
      os << buf;
    }
    os << '\n';
    for (const auto& r : t.rows) {
      for (int c : cols) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%-22s", g(r[c], 10).c_str());
        os << buf;
      }
      os << '\n';
    }
    const int cu = t.column("L2.u");
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : t.rows) pts.emplace_back(r[0], r[cu]);
    try {
      const auto fit = diagnostics::decay_fit(pts, pts.front().first, pts.back().first);
      os << "\ndecay fit of L2.u: rate " << g(fit.rate) << ", r^2 " << g(fit.r2) << '\n';
      if (!fit.warning.empty()) os << fit.warning << '\n';
    } catch (const std::invalid_argument& e) {
      os << "\ndecay fit of L2.u unavailable: " << e.what() << '\n';
    }
  }
  written.push_back(summary);

  const fs::path terms = dir / "energy_terms.dat";
  {
    std::vector<int> tc = {0};
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      const auto& h = t.header[i];
      if (h.rfind("E_s.", 0) == 0 || h.rfind("E1.", 0) == 0) tc.push_back(static_cast<int>(i));
    }
    std::ofstream os(terms);
    os << '#';
    for (int c : tc) os << ' ' << t.header[c];
    os << '\n';
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < tc.size(); ++i) os << (i ? " " : "") << g(r[tc[i]], 17);
      os << '\n';
    }
  }
  written.push_back(terms);
  return written;
}

std::vector<fs::path> report_sweep(const fs::path& dir) {
  const Table t = read_csv(dir / "sweep.csv");
  if (t.rows.empty()) throw std::runtime_error("report: " + (dir / "sweep.csv").string() + " has no members");
  const int ce = t.column("eps"), cs = t.column("sup_l2_error");
  if (ce < 0 || cs < 0) throw std::runtime_error("report: sweep.csv lacks eps/sup_l2_error");
  std::vector<fs::path> written;

  const fs::path loglog = dir / "loglog.dat";
  {
    std::ofstream os(loglog);
    os << "# log(eps) log(sup_l2_error)\n";
    for (const auto& r : t.rows) os << g(std::log(r[ce]), 17) << ' ' << g(std::log(r[cs]), 17) << '\n';
  }
  const fs::path summary = dir / "summary.txt";
  {
    std::ofstream os(summary);
    os << "sweep: " << dir.string() << "\nmembers: " << t.rows.size() << "\n\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s%-24s%-24s%-24s\n", "eps", "sup_l2_error",
                  "final_l2_error", "sup_E1_0_error");
    os << buf;
    for (const auto& r : t.rows) {
      std::snprintf(buf, sizeof buf, "%-14s%-24s%-24s%-24s\n", g(r[0]).c_str(),
                    g(r[1], 10).c_str(), g(r[2], 10).c_str(), g(r[3], 10).c_str());
      os << buf;
    }
    std::ifstream fit(dir / "fit.json");
    if (fit) {
      const auto j = nlohmann::json::parse(fit);
      if (j.value("fit_skipped", false)) {
        os << "\nslope fit skipped\n";
      } else {
        os << "\nlog-log slope " << g(j.at("slope").get<double>()) << ", intercept "
           << g(j.at("intercept").get<double>()) << '\n';
      }
      os << "strictly decreasing: " << (j.value("strictly_decreasing", false) ? "yes" : "no")
         << '\n';
    }
  }
  written.push_back(summary);
  written.push_back(loglog);
  return written;
}

}  // namespace

std::vector<fs::path> cmd_report(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("report: no such directory " + dir.string());
  if (fs::exists(dir / "sweep.csv")) return report_sweep(dir);
  if (fs::exists(dir / "series.csv")) return report_run(dir);
  throw std::runtime_error("report: " + dir.string() +
                           " has neither series.csv (run) nor sweep.csv (sweep)");
}

}  // namespace gevflow::harness
