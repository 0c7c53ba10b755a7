#include "qcma/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "qcma/errors.hpp"

namespace qcma::harness {

namespace {

using K = ColumnKind;
using T = CellType;

std::string format_real(double v, const char* fmt) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string format_cell(const Cell& c, const char* real_fmt) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d, real_fmt);
  return std::get<std::string>(c);
}

double as_real(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return double(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  throw ValidationError("text cell used as a number");
}

Cell make_cell(CellType type, double v) {
  return type == T::kInt ? Cell(std::int64_t(std::llround(v))) : Cell(v);
}

bool key_less(const TableSchema& s, const std::vector<Cell>& a, const std::vector<Cell>& b) {
  for (std::size_t c = 0; c < s.columns.size(); ++c) {
    if (s.columns[c].kind != K::kKey) continue;
    if (s.columns[c].type == T::kText) {
      const auto& x = std::get<std::string>(a[c]);
      const auto& y = std::get<std::string>(b[c]);
      if (x != y) return x < y;
    } else {
      const double x = as_real(a[c]), y = as_real(b[c]);
      if (x != y) return x < y;
    }
  }
  return false;
}

}  // namespace

std::string TableSchema::header() const {
  std::string h;
  for (std::size_t i = 0; i < columns.size(); ++i) h += (i ? "," : "") + columns[i].name;
  return h;
}

int TableSchema::column(const std::string& n) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == n) return int(i);
  }
  throw ValidationError("schema " + name + " has no column '" + n + "'");
}

const std::vector<TableSchema>& table_schemas() {
  static const std::vector<TableSchema> schemas = [] {
    std::vector<TableSchema> s;
    s.push_back({"grover-advice",
                 1,
                 {{"n", T::kInt, K::kKey},
                  {"m", T::kInt, K::kKey},
                  {"k", T::kInt, K::kSame},
                  {"trials", T::kInt, K::kSum},
                  {"successes", T::kInt, K::kSum},
                  {"success_rate", T::kReal, K::kRate, 4},
                  {"mean_success_probability", T::kReal, K::kWMean},
                  {"min_overlap", T::kReal, K::kMin},
                  {"guaranteed_overlap", T::kReal, K::kSame},
                  {"mean_queries", T::kReal, K::kWMean},
                  {"max_queries", T::kInt, K::kMax},
                  {"query_bound", T::kInt, K::kSame}},
                 3});
    s.push_back({"hybrid",
                 1,
                 {{"algorithm", T::kText, K::kKey},
                  {"n", T::kInt, K::kKey},
                  {"m", T::kInt, K::kKey},
                  {"T", T::kInt, K::kKey},
                  {"full_budget", T::kInt, K::kKey},
                  {"trials", T::kInt, K::kSum},
                  {"successes", T::kInt, K::kSum},
                  {"success_rate", T::kReal, K::kRate, 6},
                  {"mean_success_probability", T::kReal, K::kWMean},
                  {"max_queries", T::kInt, K::kMax},
                  {"mean_delta", T::kReal, K::kWMean},
                  {"max_delta_violation", T::kReal, K::kMax},
                  {"bias_violations", T::kInt, K::kSum}},
                 5});
    s.push_back({"hybrid-scaling",
                 1,
                 {{"m", T::kInt, K::kKey},
                  {"n", T::kInt, K::kKey},
                  {"trials", T::kInt, K::kSum},
                  {"t_star", T::kReal, K::kWMean}},
                 2});
    s.push_back({"ensemble",
                 1,
                 {{"ensemble", T::kText, K::kKey},
                  {"n", T::kInt, K::kKey},
                  {"k", T::kInt, K::kKey},
                  {"samples", T::kInt, K::kSum},
                  {"mean", T::kReal, K::kWMean},
                  {"stderr", T::kReal, K::kStderr},
                  {"min", T::kReal, K::kMin},
                  {"max", T::kReal, K::kMax},
                  {"haar_value", T::kReal, K::kSame}},
                 3});
    s.push_back({"randstate",
                 1,
                 {{"n", T::kInt, K::kKey},
                  {"q", T::kInt, K::kSame},
                  {"trials", T::kInt, K::kSum},
                  {"successes", T::kInt, K::kSum},
                  {"success_rate", T::kReal, K::kRate, 3},
                  {"mean_attempts", T::kReal, K::kWMean},
                  {"mean_flag_probability", T::kReal, K::kWMean},
                  {"flag_lower", T::kReal, K::kSame},
                  {"flag_upper", T::kReal, K::kSame}},
                 2});
    s.push_back({"gnm",
                 1,
                 {{"order", T::kInt, K::kKey},
                  {"group", T::kText, K::kKey},
                  {"instance", T::kText, K::kKey},
                  {"trials", T::kInt, K::kSum},
                  {"accepted", T::kInt, K::kSum},
                  {"accept_rate", T::kReal, K::kRate, 4},
                  {"mean_queries", T::kReal, K::kWMean},
                  {"max_queries", T::kInt, K::kMax},
                  {"query_bound", T::kReal, K::kSame},
                  {"kernel_checks", T::kInt, K::kSum},
                  {"kernel_agreements", T::kInt, K::kSum}},
                 3});
    s.push_back({"affine-check",
                 1,
                 {{"family", T::kText, K::kKey},
                  {"dim", T::kInt, K::kKey},
                  {"members", T::kInt, K::kSame},
                  {"self_relations", T::kInt, K::kMin},
                  {"pair_relations", T::kInt, K::kMin},
                  {"size_bound", T::kInt, K::kMin},
                  {"attains_2n", T::kInt, K::kMin},
                  {"log2_distinct_values", T::kReal, K::kSame},
                  {"extensions", T::kInt, K::kSum},
                  {"extension_violations", T::kInt, K::kSum}},
                 8});
    s.push_back({"tstar",
                 1,
                 {{"source", T::kText, K::kKey},
                  {"m", T::kInt, K::kKey},
                  {"n", T::kInt, K::kKey},
                  {"t_star", T::kReal, K::kSame},
                  {"reference", T::kReal, K::kSame},
                  {"ratio", T::kReal, K::kSame}},
                 -1});
    s.push_back({"fit",
                 1,
                 {{"source", T::kText, K::kKey},
                  {"m", T::kInt, K::kKey},
                  {"points", T::kInt, K::kSame},
                  {"exponent", T::kReal, K::kSame},
                  {"intercept", T::kReal, K::kSame}},
                 -1});
    return s;
  }();
  return schemas;
}

const TableSchema& table_schema(const std::string& name) {
  for (const auto& s : table_schemas()) {
    if (s.name == name) return s;
  }
  throw ValidationError("unknown table schema '" + name + "'");
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != schema->columns.size()) throw ValidationError("row width differs from schema " + schema->name);
  for (std::size_t c = 0; c < row.size(); ++c) {
    const bool text = std::holds_alternative<std::string>(row[c]);
    if (text != (schema->columns[c].type == T::kText)) {
      throw ValidationError("cell type mismatch in column " + schema->columns[c].name);
    }
    if (schema->columns[c].type == T::kInt && std::holds_alternative<double>(row[c])) {
      row[c] = std::int64_t(std::llround(std::get<double>(row[c])));
    } else if (schema->columns[c].type == T::kReal && std::holds_alternative<std::int64_t>(row[c])) {
      row[c] = double(std::get<std::int64_t>(row[c]));
    }
  }
  rows.push_back(std::move(row));
}

void Table::sort_by_key() {
  std::stable_sort(rows.begin(), rows.end(),
                   [this](const auto& a, const auto& b) { return key_less(*schema, a, b); });
}

std::string Table::to_csv() const {
  std::string out = schema->header() + "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_cell(row[c], "%.17g");
    out += "\n";
  }
  return out;
}

std::string Table::to_text() const {
  const std::size_t nc = schema->columns.size();
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(nc);
  for (std::size_t c = 0; c < nc; ++c) width[c] = schema->columns[c].name.size();
  for (const auto& row : rows) {
    cells.emplace_back();
    for (std::size_t c = 0; c < nc; ++c) {
      cells.back().push_back(format_cell(row[c], "%.6g"));
      width[c] = std::max(width[c], cells.back().back().size());
    }
  }
  std::ostringstream out;
  auto line = [&](auto get) {
    for (std::size_t c = 0; c < nc; ++c) {
      const std::string s = get(c);
      out << (c ? "  " : "") << std::string(width[c] - s.size(), ' ') << s;
    }
    out << '\n';
  };
  line([&](std::size_t c) { return schema->columns[c].name; });
  for (const auto& r : cells) line([&](std::size_t c) { return r[c]; });
  return out.str();
}

const Cell& Table::at(std::size_t row, const std::string& column) const {
  return rows.at(row).at(std::size_t(schema->column(column)));
}
double Table::real(std::size_t row, const std::string& column) const { return as_real(at(row, column)); }
std::int64_t Table::integer(std::size_t row, const std::string& column) const {
  return std::get<std::int64_t>(at(row, column));
}
const std::string& Table::text(std::size_t row, const std::string& column) const {
  return std::get<std::string>(at(row, column));
}

Table parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const TableSchema* schema = nullptr;
  for (const auto& s : table_schemas()) {
    if (s.header() == line) schema = &s;
  }
  if (!schema) throw ValidationError("unrecognized CSV header: " + line);
  Table table(schema->name);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != schema->columns.size()) throw ValidationError("row width differs from header: " + line);
    std::vector<Cell> row;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      try {
        switch (schema->columns[c].type) {
          case T::kInt: {
            std::size_t used = 0;
            row.emplace_back(std::int64_t(std::stoll(fields[c], &used)));
            if (used != fields[c].size()) throw std::invalid_argument("trailing");
            break;
          }
          case T::kReal: {
            std::size_t used = 0;
            row.emplace_back(std::stod(fields[c], &used));
            if (used != fields[c].size()) throw std::invalid_argument("trailing");
            break;
          }
          case T::kText: row.emplace_back(fields[c]); break;
        }
      } catch (const std::logic_error&) {
        throw ValidationError("malformed cell '" + fields[c] + "' in column " + schema->columns[c].name);
      }
    }
    table.add(std::move(row));
  }
  return table;
}

Table merge(const std::vector<Table>& tables) {
  if (tables.empty()) throw ValidationError("nothing to merge");
  const TableSchema& s = *tables.front().schema;
  Table out(s.name);
  std::vector<std::vector<Cell>> all;
  for (const auto& t : tables) {
    if (t.schema != &s) throw ValidationError("cannot merge tables of different schemas");
    all.insert(all.end(), t.rows.begin(), t.rows.end());
  }
  std::stable_sort(all.begin(), all.end(), [&](const auto& a, const auto& b) { return key_less(s, a, b); });

  const std::size_t nc = s.columns.size();
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i + 1;
    while (j < all.size() && !key_less(s, all[i], all[j]) && !key_less(s, all[j], all[i])) ++j;
    if (j == i + 1) {
      out.rows.push_back(all[i]);
      i = j;
      continue;
    }
    std::vector<Cell> row = all[i];
    double total_weight = 0.0;
    if (s.weight >= 0) {
      for (std::size_t r = i; r < j; ++r) total_weight += as_real(all[r][std::size_t(s.weight)]);
    }
    for (std::size_t c = 0; c < nc; ++c) {
      const ColumnSpec& col = s.columns[c];
      double acc = 0.0;
      switch (col.kind) {
        case K::kKey:
        case K::kSame:
        case K::kRate:
          break;
        case K::kSum:
          for (std::size_t r = i; r < j; ++r) acc += as_real(all[r][c]);
          row[c] = make_cell(col.type, acc);
          break;
        case K::kWMean:
          for (std::size_t r = i; r < j; ++r) acc += as_real(all[r][c]) * as_real(all[r][std::size_t(s.weight)]);
          row[c] = make_cell(col.type, total_weight > 0 ? acc / total_weight : 0.0);
          break;
        case K::kStderr:
          for (std::size_t r = i; r < j; ++r) {
            const double w = as_real(all[r][std::size_t(s.weight)]) * as_real(all[r][c]);
            acc += w * w;
          }
          row[c] = make_cell(col.type, total_weight > 0 ? std::sqrt(acc) / total_weight : 0.0);
          break;
        case K::kMax:
        case K::kMin:
          acc = as_real(all[i][c]);
          for (std::size_t r = i + 1; r < j; ++r) {
            acc = col.kind == K::kMax ? std::max(acc, as_real(all[r][c])) : std::min(acc, as_real(all[r][c]));
          }
          row[c] = make_cell(col.type, acc);
          break;
      }
    }
    for (std::size_t c = 0; c < nc; ++c) {
      if (s.columns[c].kind == K::kRate) {
        row[c] = make_cell(s.columns[c].type,
                           total_weight > 0 ? as_real(row[std::size_t(s.columns[c].ref)]) / total_weight : 0.0);
      }
    }
    out.rows.push_back(std::move(row));
    i = j;
  }
  return out;
}

namespace {

struct FitLine {
  double exponent = 0.0;
  double intercept = 0.0;
};

FitLine fit_log2(const std::vector<std::pair<int, double>>& points) {
  const double k = double(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [n, t] : points) {
    mx += n / 2.0;
    my += std::log2(t);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [n, t] : points) {
    sxy += (n / 2.0 - mx) * (std::log2(t) - my);
    sxx += (n / 2.0 - mx) * (n / 2.0 - mx);
  }
  FitLine f;
  f.exponent = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.exponent * mx;
  return f;
}

void add_tstar(Table& tstar, Table& fits, const std::string& source,
               const std::map<int, std::vector<std::pair<int, double>>>& by_m) {
  for (const auto& [m, points] : by_m) {
    for (const auto& [n, t] : points) {
      const double reference = std::sqrt(std::ldexp(1.0, n) / (m + 1.0));
      tstar.add({source, std::int64_t(m), std::int64_t(n), t, reference, t / reference});
    }
    if (points.size() >= 2) {
      const FitLine f = fit_log2(points);
      fits.add({source, std::int64_t(m), std::int64_t(points.size()), f.exponent, f.intercept});
    }
  }
}

}  // namespace

ReportOutput build_report(const std::vector<Table>& inputs) {
  if (inputs.empty()) throw ValidationError("report needs at least one record");
  std::map<std::string, std::vector<Table>> by_schema;
  for (const auto& t : inputs) by_schema[t.schema->name].push_back(t);

  ReportOutput out;
  Table tstar("tstar");
  Table fits("fit");
  for (const auto& [name, tables] : by_schema) {
    Table merged = merge(tables);
    if (name == "hybrid") {
      std::map<std::pair<int, int>, double> best;
      for (std::size_t r = 0; r < merged.rows.size(); ++r) {
        if (merged.text(r, "algorithm") != "verifier") continue;
        if (merged.real(r, "mean_success_probability") < 0.5) continue;
        const auto key = std::make_pair(int(merged.integer(r, "m")), int(merged.integer(r, "n")));
        const double cap = double(merged.integer(r, "T"));
        auto it = best.find(key);
        if (it == best.end() || cap < it->second) best[key] = cap;
      }
      std::map<int, std::vector<std::pair<int, double>>> by_m;
      for (const auto& [key, cap] : best) {
        if (cap > 0) by_m[key.first].emplace_back(key.second, cap);
      }
      add_tstar(tstar, fits, "sweep", by_m);
    } else if (name == "hybrid-scaling") {
      std::map<int, std::vector<std::pair<int, double>>> by_m;
      for (std::size_t r = 0; r < merged.rows.size(); ++r) {
        const double t = merged.real(r, "t_star");
        if (t > 0) by_m[int(merged.integer(r, "m"))].emplace_back(int(merged.integer(r, "n")), t);
      }
      add_tstar(tstar, fits, "scaling", by_m);
    }
    out.tables.push_back(std::move(merged));
  }
  if (!tstar.rows.empty()) {
    tstar.sort_by_key();
    fits.sort_by_key();
    out.tables.push_back(std::move(tstar));
    if (!fits.rows.empty()) out.tables.push_back(std::move(fits));
  }

  std::ostringstream text;
  for (const auto& t : out.tables) {
    text << "== " << t.schema->name << " (" << t.rows.size() << (t.rows.size() == 1 ? " row" : " rows") << ")\n"
         << t.to_text() << '\n';
  }
  out.text = text.str();
  return out;
}

}  // namespace qcma::harness
