#include "covdim/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace covdim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim whitespace and CR
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("non-numeric value '" + s + "' at " + where);
  }
}

long parse_long(const std::string& s, const std::string& where) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError("non-integer value '" + s + "' at " + where);
  return v;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

ordered_json report_envelope(const std::string& config_json) {
  ordered_json j;
  j["artifact_version"] = "1.0.0";
  if (!config_json.empty())
    j["config"] = ordered_json::parse(config_json);
  return j;
}

ordered_json test_report_json(const TestReport& r) {
  ordered_json j;
  j["d0"] = r.d0;
  j["m_hat_d0"] = r.m_hat_d0;
  j["m_hat_d0_plus_1"] = r.m_hat_d0p1;
  j["beta_hat"] = r.beta_hat;
  j["sigma_hat"] = r.sigma_hat;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["alpha"] = r.alpha;
  j["reject"] = r.reject;
  j["q"] = r.q;
  j["p"] = r.p;
  return j;
}

void finish(ordered_json& j, const std::filesystem::path& out) {
  write_text(out.string() + ".json", j.dump(2) + "\n");
}

}  // namespace

std::vector<GroupSample> load_groups(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw DataError("not a directory: " + dir.string());
  std::map<long, std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("group_", 0) == 0 && entry.path().extension() == ".csv") {
      const std::string id_str =
          name.substr(6, name.size() - 6 - 4);  // strip prefix and .csv
      files[parse_long(id_str, name)] = entry.path();
    }
  }
  if (files.empty())
    throw EmptyInputError("no group_<id>.csv files in " + dir.string());

  std::vector<GroupSample> groups;
  int p = -1;
  for (const auto& [id, path] : files) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line))
      throw DataError("empty file: " + path.string());
    const int cols = static_cast<int>(split_csv_line(line).size());
    if (p < 0)
      p = cols;
    else if (cols != p)
      throw DataError("inconsistent p in " + path.string() + ": got " +
                      std::to_string(cols) + ", expected " + std::to_string(p));
    std::vector<std::vector<double>> rows;
    int rowno = 1;
    while (std::getline(f, line)) {
      ++rowno;
      if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
        continue;
      auto fields = split_csv_line(line);
      if (static_cast<int>(fields.size()) != p)
        throw DataError(path.string() + " row " + std::to_string(rowno) +
                        ": expected " + std::to_string(p) + " fields");
      std::vector<double> row(p);
      for (int c = 0; c < p; ++c)
        row[c] = parse_double(fields[c], path.filename().string() + " row " +
                                             std::to_string(rowno) + " col " +
                                             std::to_string(c + 1));
      rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(rows.size());
    if (n < 5)
      throw SampleTooSmallError(path.string() + ": need at least 5 rows, got " +
                                std::to_string(n));
    Eigen::MatrixXd x(p, n);  // observations become columns
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < p; ++c) x(c, r) = rows[r][c];
    groups.emplace_back(static_cast<int>(id), std::move(x));
  }
  return groups;
}

std::vector<Eigen::MatrixXd> load_matrix_observations(
    const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw IoError("cannot open " + file.string());
  std::string line;
  if (!std::getline(f, line)) throw DataError("empty file: " + file.string());
  auto header = split_csv_line(line);
  if (header.size() != 4 || header[0] != "obs" || header[1] != "row" ||
      header[2] != "col" || header[3] != "value")
    throw DataError(file.string() + ": expected header obs,row,col,value");

  struct Cell {
    long obs, row, col;
    bool operator<(const Cell& o) const {
      return std::tie(obs, row, col) < std::tie(o.obs, o.row, o.col);
    }
  };
  std::map<Cell, double> cells;
  long max_row = 0, max_col = 0;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto fields = split_csv_line(line);
    const std::string where = file.filename().string() + " line " +
                              std::to_string(lineno);
    if (fields.size() != 4) throw DataError(where + ": expected 4 fields");
    Cell c{parse_long(fields[0], where), parse_long(fields[1], where),
           parse_long(fields[2], where)};
    double v = parse_double(fields[3], where);
    if (c.row < 1 || c.col < 1)
      throw DataError(where + ": row/col indices are 1-based");
    if (!cells.emplace(c, v).second)
      throw DataError("duplicate cell (obs=" + std::to_string(c.obs) +
                      ", row=" + std::to_string(c.row) +
                      ", col=" + std::to_string(c.col) + ")");
    max_row = std::max(max_row, c.row);
    max_col = std::max(max_col, c.col);
  }
  if (cells.empty()) throw EmptyInputError("no data rows in " + file.string());

  std::map<long, Eigen::MatrixXd> by_obs;
  for (const auto& [c, v] : cells) {
    auto it = by_obs.find(c.obs);
    if (it == by_obs.end()) {
      it = by_obs
               .emplace(c.obs, Eigen::MatrixXd::Constant(
                                   max_row, max_col,
                                   std::numeric_limits<double>::quiet_NaN()))
               .first;
    }
    it->second(c.row - 1, c.col - 1) = v;
  }
  std::vector<Eigen::MatrixXd> out;
  for (const auto& [obs, m] : by_obs) {
    for (long r = 0; r < max_row; ++r)
      for (long c = 0; c < max_col; ++c)
        if (std::isnan(m(r, c)))
          throw DataError("missing cell (obs=" + std::to_string(obs) +
                          ", row=" + std::to_string(r + 1) +
                          ", col=" + std::to_string(c + 1) + ")");
    out.push_back(m);
  }
  return out;
}

void emit_report(const TestReport& r, const std::filesystem::path& out,
                 const std::string& config_json) {
  ordered_json j = report_envelope(config_json);
  j["report"] = test_report_json(r);
  finish(j, out);
}

void emit_report(const SequentialReport& r, const std::filesystem::path& out,
                 const std::string& config_json) {
  ordered_json j = report_envelope(config_json);
  j["alpha"] = r.alpha;
  if (r.estimated_d)
    j["estimated_d"] = *r.estimated_d;
  else
    j["estimated_d"] = nullptr;
  ordered_json steps = ordered_json::array();
  for (const auto& [d, rep] : r.per_d) {
    ordered_json s = test_report_json(rep);
    steps.push_back(std::move(s));
  }
  j["per_d"] = std::move(steps);
  finish(j, out);
}

void emit_report(const McResult& r, const std::filesystem::path& out,
                 const std::string& config_json) {
  ordered_json j = report_envelope(config_json);
  j["reps"] = r.reps;
  j["alpha"] = r.alpha;
  j["seed"] = r.seed;
  j["w_grid"] = r.w_grid;
  j["rejection_rate"] = r.rejection_rate;
  j["theoretical"] = r.theoretical;
  j["excluded"] = r.excluded;
  finish(j, out);

  std::ostringstream csv;
  csv << "w,empirical_rate,theoretical,reps,excluded\n";
  for (std::size_t i = 0; i < r.w_grid.size(); ++i)
    csv << r.w_grid[i] << "," << r.rejection_rate[i] << "," << r.theoretical[i]
        << "," << r.reps << "," << r.excluded[i] << "\n";
  write_text(out.string() + ".csv", csv.str());
}

void emit_report(const RssSummary& r, const std::filesystem::path& out,
                 const std::string& config_json) {
  ordered_json j = report_envelope(config_json);
  j["splits"] = r.splits;
  j["ranks"] = r.ranks;
  j["seed"] = r.seed;
  j["diff_mean"] = r.diff_mean;
  j["diff_sd"] = r.diff_sd;
  j["frac_higher_rank_better"] = r.frac_higher_rank_better;
  finish(j, out);

  std::ostringstream csv;
  csv << "split";
  for (int rank : r.ranks) csv << ",rss_rank_" << rank;
  csv << "\n";
  for (int s = 0; s < r.splits; ++s) {
    csv << s;
    for (std::size_t ri = 0; ri < r.ranks.size(); ++ri)
      csv << "," << r.rss_by_rank[ri][s];
    csv << "\n";
  }
  write_text(out.string() + ".csv", csv.str());
}

}  // namespace covdim
