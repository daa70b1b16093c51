#include "graphsupou/io.hpp"

#include "graphsupou/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace graphsupou {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  if (cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("line " + std::to_string(line_no) + ": cannot parse '" + cell + "' as a number");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open '" + file.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot open '" + file.string() + "' for writing");
  return out;
}

void check_written(const std::ostream& out, const std::filesystem::path& file) {
  if (!out) throw ConfigError("failed writing '" + file.string() + "'");
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v(i));
  }
  return out;
}

Eigen::VectorXd parse_vector(const std::string& text) {
  const auto cells = split(text, ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].empty()) throw ConfigError("empty entry in vector '" + text + "'");
    if (cells[i] == "inf") {
      v(i) = std::numeric_limits<double>::infinity();
    } else if (cells[i] == "-inf") {
      v(i) = -std::numeric_limits<double>::infinity();
    } else {
      v(i) = parse_cell(cells[i], 0);
    }
  }
  return v;
}

Table read_csv_table(std::istream& in) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ConfigError("CSV input is empty");
  t.columns = split(trim(line), ',');
  std::vector<double> cells;
  Eigen::Index rows = 0;
  const std::size_t width = t.columns.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto parts = split(trim(line), ',');
    if (parts.size() != width) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " columns");
    }
    for (const auto& p : parts) cells.push_back(parse_cell(p, line_no));
    ++rows;
  }
  t.data = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), rows, static_cast<Eigen::Index>(width));
  return t;
}

Table read_csv_table(const std::filesystem::path& file) {
  auto in = open_in(file);
  return read_csv_table(in);
}

void write_csv_table(std::ostream& out, const Table& table) {
  for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << table.columns[j];
  out << '\n';
  for (Eigen::Index i = 0; i < table.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.data.cols(); ++j) out << (j ? "," : "") << format_double(table.data(i, j));
    out << '\n';
  }
}

void write_csv_table(const std::filesystem::path& file, const Table& table) {
  auto out = open_out(file);
  write_csv_table(out, table);
  check_written(out, file);
}

void write_path_csv(std::ostream& out, const SamplePath& path) {
  out << 't';
  for (Eigen::Index j = 1; j <= path.d(); ++j) out << ",x" << j;
  out << '\n';
  for (Eigen::Index t = 0; t < path.N(); ++t) {
    out << (t + 1);
    for (Eigen::Index j = 0; j < path.d(); ++j) out << ',' << format_double(path.values(t, j));
    out << '\n';
  }
}

void write_path_csv(const std::filesystem::path& file, const SamplePath& path) {
  auto out = open_out(file);
  write_path_csv(out, path);
  check_written(out, file);
}

SamplePath read_path_csv(std::istream& in, double delta) {
  const Table t = read_csv_table(in);
  if (t.columns.size() < 2) throw ConfigError("path CSV needs a time column and at least one value column");
  if (t.data.rows() < 1) throw ConfigError("path CSV has no observations");
  for (Eigen::Index i = 1; i < t.data.rows(); ++i) {
    if (!(t.data(i, 0) > t.data(i - 1, 0))) throw ConfigError("time column is not increasing");
  }
  SamplePath p;
  p.delta = delta;
  p.values = t.data.rightCols(t.data.cols() - 1);
  if (!p.values.allFinite()) throw ConfigError("path CSV contains missing or non-finite values");
  return p;
}

SamplePath read_path_csv(const std::filesystem::path& file, double delta) {
  auto in = open_in(file);
  return read_path_csv(in, delta);
}

void KeyValues::set(const std::string& key, const std::string& value) {
  const auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = value;
    return;
  }
  index_[key] = entries_.size();
  entries_.emplace_back(key, value);
}

void KeyValues::set(const std::string& key, double value) { set(key, format_double(value)); }
void KeyValues::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].second;
}

double KeyValues::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ConfigError("missing key '" + key + "'");
  const Eigen::VectorXd x = parse_vector(*v);
  if (x.size() != 1) throw ConfigError("key '" + key + "' is not a scalar");
  return x(0);
}

namespace {

bool parse_key_value_line(const std::string& raw, std::string& key, std::string& value) {
  const std::string line = trim(raw.substr(0, raw.find('#')));
  if (line.empty()) return false;
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'");
  key = trim(line.substr(0, eq));
  value = trim(line.substr(eq + 1));
  if (key.empty()) throw ConfigError("empty key in '" + line + "'");
  return true;
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::string key;
  std::string value;
  while (std::getline(in, line)) {
    if (parse_key_value_line(line, key, value)) kv.set(key, value);
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& file) {
  auto in = open_in(file);
  return read_key_values(in);
}

void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv.entries()) out << k << " = " << v << '\n';
}

void write_key_values(const std::filesystem::path& file, const KeyValues& kv) {
  auto out = open_out(file);
  write_key_values(out, kv);
  check_written(out, file);
}

void FitDocument::add_matrix(const std::string& name, const Eigen::MatrixXd& M) {
  for (auto& [n, m] : matrices) {
    if (n == name) {
      m = M;
      return;
    }
  }
  matrices.emplace_back(name, M);
}

const Eigen::MatrixXd& FitDocument::matrix(const std::string& name) const {
  for (const auto& [n, m] : matrices) {
    if (n == name) return m;
  }
  throw ConfigError("fit document has no matrix '" + name + "'");
}

bool FitDocument::has_matrix(const std::string& name) const {
  for (const auto& entry : matrices) {
    if (entry.first == name) return true;
  }
  return false;
}

void write_fit_document(std::ostream& out, const FitDocument& doc) {
  write_key_values(out, doc.values);
  for (const auto& [name, M] : doc.matrices) {
    out << "@matrix " << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) out << format_vector(M.row(i).transpose()) << '\n';
    out << "@end\n";
  }
}

void write_fit_document(const std::filesystem::path& file, const FitDocument& doc) {
  auto out = open_out(file);
  write_fit_document(out, doc);
  check_written(out, file);
}

FitDocument read_fit_document(std::istream& in) {
  FitDocument doc;
  std::string line;
  std::string key;
  std::string value;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.rfind("@matrix", 0) == 0) {
      std::istringstream header(t.substr(7));
      std::string name;
      Eigen::Index rows = -1;
      Eigen::Index cols = -1;
      if (!(header >> name >> rows >> cols) || rows < 0 || cols < 0) throw ConfigError("bad matrix header '" + t + "'");
      Eigen::MatrixXd M(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw ConfigError("matrix '" + name + "' is truncated");
        const Eigen::VectorXd r = parse_vector(trim(line));
        if (r.size() != cols) throw ConfigError("matrix '" + name + "' has a row of the wrong length");
        M.row(i) = r.transpose();
      }
      if (!std::getline(in, line) || trim(line) != "@end") throw ConfigError("matrix '" + name + "' lacks @end");
      doc.add_matrix(name, M);
    } else if (parse_key_value_line(line, key, value)) {
      doc.values.set(key, value);
    }
  }
  return doc;
}

FitDocument read_fit_document(const std::filesystem::path& file) {
  auto in = open_in(file);
  return read_fit_document(in);
}

}  // namespace graphsupou
