#pragma once

#include "graphsupou/simulate.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace graphsupou {

/// Numeric table with a header row. Empty cells and NA/NaN read as NaN.
struct Table {
  std::vector<std::string> columns;
  Eigen::MatrixXd data;
};

Table read_csv_table(std::istream& in);
Table read_csv_table(const std::filesystem::path& file);
void write_csv_table(std::ostream& out, const Table& table);
void write_csv_table(const std::filesystem::path& file, const Table& table);

// Sample path CSV: header t,x1..xd, row t = 1..N with t in units of delta.
void write_path_csv(std::ostream& out, const SamplePath& path);
void write_path_csv(const std::filesystem::path& file, const SamplePath& path);
// Reads a path CSV; the first column is the time index and is only checked
// for being increasing.
SamplePath read_path_csv(std::istream& in, double delta = 1.0);
SamplePath read_path_csv(const std::filesystem::path& file, double delta = 1.0);

/// key = value lines; '#' comments and blank lines ignored. Keys keep their
/// insertion order when written.
class KeyValues {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool contains(const std::string& key) const { return index_.count(key) > 0; }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
};

KeyValues read_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& file);
void write_key_values(std::ostream& out, const KeyValues& kv);
void write_key_values(const std::filesystem::path& file, const KeyValues& kv);

// Full-precision decimal rendering used by every writer.
std::string format_double(double v);
std::string format_vector(const Eigen::VectorXd& v);
Eigen::VectorXd parse_vector(const std::string& text);

/// Fit result document: key = value lines followed by matrices as
///   @matrix <name> <rows> <cols>
///   row-major CSV lines
///   @end
struct FitDocument {
  KeyValues values;
  std::vector<std::pair<std::string, Eigen::MatrixXd>> matrices;

  void add_matrix(const std::string& name, const Eigen::MatrixXd& M);
  const Eigen::MatrixXd& matrix(const std::string& name) const;
  bool has_matrix(const std::string& name) const;
};

void write_fit_document(std::ostream& out, const FitDocument& doc);
void write_fit_document(const std::filesystem::path& file, const FitDocument& doc);
FitDocument read_fit_document(std::istream& in);
FitDocument read_fit_document(const std::filesystem::path& file);

}  // namespace graphsupou
