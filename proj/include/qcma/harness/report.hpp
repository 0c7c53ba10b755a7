#pragma once

// Result tables with fixed, versioned CSV schemas; merging of records by cell
// key and the summary report (sweep table, T* per register size, fits).

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace qcma::harness {

inline constexpr const char* kLibraryVersion = "0.1.0";

using Cell = std::variant<std::int64_t, double, std::string>;

enum class ColumnKind {
  kKey,     // part of the cell key
  kSum,
  kWMean,   // mean weighted by the schema's weight column
  kStderr,  // standard error of a weighted mean: sqrt(sum (w se)^2) / sum w
  kMax,
  kMin,
  kSame,    // constant per cell; merging keeps the first value
  kRate,    // column[ref] / weight, recomputed after merging
};

enum class CellType { kInt, kReal, kText };

struct ColumnSpec {
  std::string name;
  CellType type;
  ColumnKind kind;
  int ref = -1;
};

struct TableSchema {
  std::string name;
  int version = 1;
  std::vector<ColumnSpec> columns;
  /// Column holding trial or sample counts.
  int weight = -1;

  std::string header() const;
  int column(const std::string& name) const;
};

/// grover-advice, hybrid, hybrid-scaling, ensemble, randstate, gnm,
/// affine-check, tstar, fit.
const std::vector<TableSchema>& table_schemas();
const TableSchema& table_schema(const std::string& name);

struct Table {
  const TableSchema* schema = nullptr;
  std::vector<std::vector<Cell>> rows;

  explicit Table(const std::string& schema_name) : schema(&table_schema(schema_name)) {}

  void add(std::vector<Cell> row);
  /// Rows ordered by key columns (numbers numerically, text lexically).
  void sort_by_key();
  /// Header line then one line per row; reals use %.17g.
  std::string to_csv() const;
  /// Aligned columns for terminals; reals use %.6g.
  std::string to_text() const;

  const Cell& at(std::size_t row, const std::string& column) const;
  double real(std::size_t row, const std::string& column) const;
  std::int64_t integer(std::size_t row, const std::string& column) const;
  const std::string& text(std::size_t row, const std::string& column) const;
};

/// Recognizes the schema from the header line; throws ValidationError on an
/// unknown header or malformed cells.
Table parse_csv(const std::string& text);

/// Concatenates tables of one schema and combines rows that share a key.
Table merge(const std::vector<Table>& tables);

struct ReportOutput {
  /// One merged table per input schema plus tstar and fit when sweep or
  /// scaling rows are present.
  std::vector<Table> tables;
  std::string text;
};

/// T* per (n, m) counts amplification iterations (queries minus the final
/// test query): the smallest swept cap whose mean success probability
/// reaches 1/2, or the mean per-state minimal cap in scaling rows. A zero T*
/// has no logarithm and is listed in neither table. Fits regress log2 T* on
/// n/2 for every m with two or more register sizes. Throws ValidationError on
/// empty input.
ReportOutput build_report(const std::vector<Table>& inputs);

}  // namespace qcma::harness
