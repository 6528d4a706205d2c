#include "salecast/frame.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace salecast {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc{}) return false;
  while (p < e && (*p == ' ' || *p == '\t')) ++p;
  return p == e;
}

// Accepts YYYY-MM and YYYY-MM-DD; only year-month is retained.
bool parse_month(const std::string& s, int& out) {
  int year = 0, month = 0, day = 1;
  const int n = std::sscanf(s.c_str(), "%d-%d-%d", &year, &month, &day);
  if (n < 2 || month < 1 || month > 12 || year < 1000 || year > 9999) return false;
  out = month_index(year, month);
  return true;
}

std::string month_string(int idx) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", month_index_year(idx),
                month_index_month(idx));
  return buf;
}

constexpr const char* kTarget = "price_high_low";
const std::set<std::string> kNonFeature = {"parid", "price", "aprtot",
                                           "sale_date", "price_high_low"};

}  // namespace

const ColumnSpec* Schema::find(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return &c;
  return nullptr;
}

Schema Schema::market() {
  using K = ColumnKind;
  Schema s;
  s.columns = {
      {"parid", K::NumericReal},      {"price", K::NumericReal},
      {"aprtot", K::NumericReal},     {"sale_date", K::DateMonth},
      {"aprland", K::NumericReal},    {"aprblgd", K::NumericReal},
      {"nbhd", K::CategoricalInteger},{"rmbed", K::NumericReal},
      {"sfla", K::NumericReal},       {"total_area", K::NumericReal},
      {"yrblt", K::NumericReal},      {"misc_area", K::NumericReal},
      {"zip21", K::CategoricalInteger},{"sasd", K::NumericReal},
      {"nsasd", K::NumericReal},      {"stxbl", K::NumericReal},
      {"nstxbl", K::NumericReal},     {"cotxbl", K::NumericReal},
      {"citxbl", K::NumericReal},     {"hx_flag", K::CategoricalInteger},
      {"luc", K::CategoricalInteger}, {"mararea", K::CategoricalInteger},
  };
  return s;
}

Schema Schema::socio() {
  using K = ColumnKind;
  Schema s;
  s.columns = {
      {"month", K::DateMonth}, {"gdp", K::NumericReal},
      {"cpi", K::NumericReal}, {"ppi", K::NumericReal},
      {"hpi", K::NumericReal}, {"effr", K::NumericReal},
  };
  return s;
}

bool Column::any_missing() const {
  return std::any_of(missing.begin(), missing.end(),
                     [](std::uint8_t m) { return m != 0; });
}

bool Frame::has_column(const std::string& name) const {
  return cols_.count(name) != 0;
}

const Column& Frame::column(const std::string& name) const {
  auto it = cols_.find(name);
  if (it == cols_.end()) throw DataError("no such column: " + name);
  return it->second;
}

void Frame::add_column(const std::string& name, Column col) {
  if (cols_.count(name)) throw DataError("duplicate column: " + name);
  if (order_.empty()) {
    n_rows_ = col.values.size();
  } else if (col.values.size() != n_rows_) {
    throw DataError("column length mismatch for " + name);
  }
  if (col.missing.empty()) col.missing.assign(col.values.size(), 0);
  if (col.missing.size() != col.values.size())
    throw DataError("missing-mask length mismatch for " + name);
  order_.push_back(name);
  cols_.emplace(name, std::move(col));
}

void Frame::drop_column(const std::string& name) {
  auto it = std::find(order_.begin(), order_.end(), name);
  if (it == order_.end()) throw DataError("no such column: " + name);
  order_.erase(it);
  cols_.erase(name);
}

Frame Frame::select_rows(const std::vector<std::size_t>& rows) const {
  Frame out;
  for (const auto& name : order_) {
    const Column& src = cols_.at(name);
    Column dst;
    dst.kind = src.kind;
    dst.values.reserve(rows.size());
    dst.missing.reserve(rows.size());
    for (std::size_t r : rows) {
      dst.values.push_back(src.values[r]);
      dst.missing.push_back(src.missing[r]);
    }
    out.add_column(name, std::move(dst));
  }
  return out;
}

std::vector<std::string> Frame::feature_names() const {
  std::vector<std::string> out;
  for (const auto& name : order_)
    if (!kNonFeature.count(name)) out.push_back(name);
  return out;
}

const SocioRow* SocioTable::find(int month_idx) const {
  auto it = std::lower_bound(
      rows.begin(), rows.end(), month_idx,
      [](const auto& a, int b) { return a.first < b; });
  if (it == rows.end() || it->first != month_idx) return nullptr;
  return &it->second;
}

SocioTable SocioTable::load_csv(const std::string& path) {
  Frame f = salecast::load_csv(path, Schema::socio());
  SocioTable t;
  t.rows.reserve(f.n_rows());
  const auto& month = f.column("month");
  for (std::size_t i = 0; i < f.n_rows(); ++i) {
    SocioRow r{f.value("gdp", i), f.value("cpi", i), f.value("ppi", i),
               f.value("hpi", i), f.value("effr", i)};
    t.rows.emplace_back(static_cast<int>(month.values[i]), r);
  }
  std::sort(t.rows.begin(), t.rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    if (t.rows[i].first == t.rows[i - 1].first)
      throw DataError("duplicate socio month: " + month_string(t.rows[i].first));
  return t;
}

Frame load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  const auto header = split_csv_line(line);

  std::vector<int> col_pos(schema.columns.size(), -1);
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    for (std::size_t h = 0; h < header.size(); ++h)
      if (header[h] == schema.columns[c].name) col_pos[c] = static_cast<int>(h);
    if (col_pos[c] < 0 && schema.columns[c].required)
      throw DataError("missing required column: " + schema.columns[c].name);
  }

  std::vector<Column> cols(schema.columns.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c)
    cols[c].kind = schema.columns[c].kind;

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      if (col_pos[c] < 0) continue;
      const std::size_t h = static_cast<std::size_t>(col_pos[c]);
      const std::string cell = h < cells.size() ? cells[h] : std::string{};
      double v = 0.0;
      bool ok;
      if (cell.empty()) {
        cols[c].values.push_back(0.0);
        cols[c].missing.push_back(1);
        continue;
      }
      if (schema.columns[c].kind == ColumnKind::DateMonth) {
        int m = 0;
        ok = parse_month(cell, m);
        v = m;
      } else {
        ok = parse_double(cell, v);
      }
      if (!ok)
        throw DataError("unparseable cell at row " + std::to_string(row + 2) +
                        ", column " + schema.columns[c].name + ": '" + cell + "'");
      cols[c].values.push_back(v);
      cols[c].missing.push_back(0);
    }
    ++row;
  }
  if (row == 0) throw DataError("no data rows in " + path);

  Frame f;
  for (std::size_t c = 0; c < schema.columns.size(); ++c)
    if (col_pos[c] >= 0) f.add_column(schema.columns[c].name, std::move(cols[c]));
  return f;
}

void write_csv(const Frame& frame, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  const auto& names = frame.column_names();
  for (std::size_t c = 0; c < names.size(); ++c)
    out << (c ? "," : "") << names[c];
  out << "\n";
  char buf[64];
  for (std::size_t r = 0; r < frame.n_rows(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (c) out << ",";
      const Column& col = frame.column(names[c]);
      if (col.missing[r]) continue;
      if (col.kind == ColumnKind::DateMonth) {
        out << month_string(static_cast<int>(col.values[r]));
      } else {
        // shortest representation that round-trips a double
        std::snprintf(buf, sizeof buf, "%.17g", col.values[r]);
        double check;
        std::snprintf(buf, sizeof buf, "%.15g", col.values[r]);
        if (!parse_double(buf, check) || check != col.values[r]) {
          std::snprintf(buf, sizeof buf, "%.17g", col.values[r]);
        }
        out << buf;
      }
    }
    out << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

Frame derive_target(const Frame& frame, std::size_t* rejected) {
  if (!frame.has_column("price") || !frame.has_column("aprtot"))
    throw DataError("derive_target requires price and aprtot columns");
  const Column& price = frame.column("price");
  const Column& aprtot = frame.column("aprtot");

  std::vector<std::size_t> keep;
  keep.reserve(frame.n_rows());
  for (std::size_t r = 0; r < frame.n_rows(); ++r)
    if (!price.missing[r] && !aprtot.missing[r]) keep.push_back(r);
  if (rejected) *rejected = frame.n_rows() - keep.size();

  Frame out = keep.size() == frame.n_rows() ? frame : frame.select_rows(keep);
  Column target;
  target.kind = ColumnKind::CategoricalInteger;
  const Column& p = out.column("price");
  const Column& a = out.column("aprtot");
  target.values.reserve(out.n_rows());
  for (std::size_t r = 0; r < out.n_rows(); ++r)
    target.values.push_back(p.values[r] > a.values[r] ? 1.0 : 0.0);
  if (out.has_column(kTarget)) out.drop_column(kTarget);
  out.add_column(kTarget, std::move(target));
  return out;
}

Frame join_socio(const Frame& frame, const SocioTable& socio) {
  if (!frame.has_column("sale_date"))
    throw DataError("join_socio requires sale_date");
  const Column& date = frame.column("sale_date");
  std::set<int> missing_months;
  for (std::size_t r = 0; r < frame.n_rows(); ++r) {
    if (date.missing[r]) continue;
    if (!socio.find(static_cast<int>(date.values[r])))
      missing_months.insert(static_cast<int>(date.values[r]));
  }
  if (!missing_months.empty()) {
    std::string msg = "socio table missing months:";
    for (int m : missing_months) msg += " " + month_string(m);
    throw DataError(msg);
  }

  Frame out = frame;
  const char* names[5] = {"gdp", "cpi", "ppi", "hpi", "effr"};
  std::vector<Column> cols(5);
  for (auto& c : cols) {
    c.kind = ColumnKind::NumericReal;
    c.values.reserve(frame.n_rows());
    c.missing.reserve(frame.n_rows());
  }
  for (std::size_t r = 0; r < frame.n_rows(); ++r) {
    if (date.missing[r]) {
      for (auto& c : cols) {
        c.values.push_back(0.0);
        c.missing.push_back(1);
      }
      continue;
    }
    const SocioRow* s = socio.find(static_cast<int>(date.values[r]));
    const double vals[5] = {s->gdp, s->cpi, s->ppi, s->hpi, s->effr};
    for (int i = 0; i < 5; ++i) {
      cols[i].values.push_back(vals[i]);
      cols[i].missing.push_back(0);
    }
  }
  for (int i = 0; i < 5; ++i) {
    if (out.has_column(names[i])) out.drop_column(names[i]);
    out.add_column(names[i], std::move(cols[i]));
  }
  return out;
}

Frame prepare(const Frame& frame, std::size_t* rejected) {
  if (!frame.has_column("sale_date") || !frame.has_column("yrblt"))
    throw DataError("prepare requires sale_date and yrblt");
  Frame out = frame;
  const Column& date = out.column("sale_date");
  const Column& yrblt = out.column("yrblt");

  Column age, year_sale, month_sale;
  age.kind = ColumnKind::NumericReal;
  year_sale.kind = ColumnKind::CategoricalInteger;
  month_sale.kind = ColumnKind::CategoricalInteger;
  for (std::size_t r = 0; r < out.n_rows(); ++r) {
    const bool miss = date.missing[r] || yrblt.missing[r];
    const int year = miss ? 0 : month_index_year(static_cast<int>(date.values[r]));
    const int month = miss ? 0 : month_index_month(static_cast<int>(date.values[r]));
    age.values.push_back(miss ? 0.0 : year - yrblt.values[r]);
    age.missing.push_back(miss);
    year_sale.values.push_back(year);
    year_sale.missing.push_back(date.missing[r]);
    month_sale.values.push_back(month);
    month_sale.missing.push_back(date.missing[r]);
  }
  for (const char* n : {"age", "year_sale", "month_sale"})
    if (out.has_column(n)) out.drop_column(n);
  out.add_column("age", std::move(age));
  out.add_column("year_sale", std::move(year_sale));
  out.add_column("month_sale", std::move(month_sale));

  // reject rows with masked cells in any model-input column
  const auto features = out.feature_names();
  std::vector<std::size_t> keep;
  keep.reserve(out.n_rows());
  for (std::size_t r = 0; r < out.n_rows(); ++r) {
    bool ok = true;
    for (const auto& f : features)
      if (out.column(f).missing[r]) {
        ok = false;
        break;
      }
    if (out.has_column("sale_date") && out.column("sale_date").missing[r]) ok = false;
    if (ok) keep.push_back(r);
  }
  if (rejected) *rejected = out.n_rows() - keep.size();
  if (keep.size() != out.n_rows()) out = out.select_rows(keep);
  return out;
}

std::vector<std::vector<double>> pearson_matrix(
    const Frame& frame, const std::vector<std::string>& cols) {
  const std::size_t n = frame.n_rows();
  const std::size_t d = cols.size();
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& v = frame.column(cols[j]).values;
    for (double x : v) mean[j] += x;
    mean[j] /= static_cast<double>(n);
    for (double x : v) sd[j] += (x - mean[j]) * (x - mean[j]);
    if (sd[j] == 0.0) throw DataError("constant column: " + cols[j]);
    sd[j] = std::sqrt(sd[j]);
  }
  std::vector<std::vector<double>> m(d, std::vector<double>(d, 1.0));
  for (std::size_t i = 0; i < d; ++i) {
    const auto& vi = frame.column(cols[i]).values;
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto& vj = frame.column(cols[j]).values;
      double cov = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        cov += (vi[r] - mean[i]) * (vj[r] - mean[j]);
      m[i][j] = m[j][i] = cov / (sd[i] * sd[j]);
    }
  }
  return m;
}

std::vector<YearSummary> summarize(const Frame& frame) {
  const Column& date = frame.column("sale_date");
  const Column& target = frame.column(kTarget);
  std::map<int, std::pair<std::size_t, std::size_t>> by_year;  // count, pos
  for (std::size_t r = 0; r < frame.n_rows(); ++r) {
    auto& e = by_year[month_index_year(static_cast<int>(date.values[r]))];
    ++e.first;
    if (target.values[r] == 1.0) ++e.second;
  }
  std::vector<YearSummary> out;
  for (const auto& [year, e] : by_year)
    out.push_back({year, e.first,
                   static_cast<double>(e.second) / static_cast<double>(e.first)});
  return out;
}

}  // namespace salecast
