#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace salecast {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { NumericReal, CategoricalInteger, DateMonth };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::NumericReal;
  bool required = true;
};

struct Schema {
  std::vector<ColumnSpec> columns;

  const ColumnSpec* find(const std::string& name) const;

  // Market-sale CSV schema: identifier, price/appraisal pair, sale date and
  // the 18 raw property features. Three more model features (age, year_sale,
  // month_sale) are derived during prepare(), for 21 model inputs total.
  static Schema market();
  // Monthly socio-economic series: month,gdp,cpi,ppi,hpi,effr
  static Schema socio();
};

// DateMonth cells are stored as a month index: year*12 + (month-1).
inline int month_index(int year, int month) { return year * 12 + (month - 1); }
inline int month_index_year(int idx) { return idx / 12; }
inline int month_index_month(int idx) { return idx % 12 + 1; }

struct Column {
  ColumnKind kind = ColumnKind::NumericReal;
  std::vector<double> values;
  std::vector<std::uint8_t> missing;  // 1 = masked

  bool any_missing() const;
};

// Column-oriented typed table. Immutable by convention once prepared; the
// mutating operations below all return a new Frame.
class Frame {
 public:
  Frame() = default;

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return order_.size(); }
  const std::vector<std::string>& column_names() const { return order_; }

  bool has_column(const std::string& name) const;
  const Column& column(const std::string& name) const;
  void add_column(const std::string& name, Column col);
  void drop_column(const std::string& name);

  double value(const std::string& name, std::size_t row) const {
    return column(name).values[row];
  }

  Frame select_rows(const std::vector<std::size_t>& rows) const;

  // Names of columns usable as model inputs (everything except identifiers,
  // price/aprtot, sale_date and the target).
  std::vector<std::string> feature_names() const;

 private:
  std::size_t n_rows_ = 0;
  std::vector<std::string> order_;
  std::map<std::string, Column> cols_;
};

struct SocioRow {
  double gdp, cpi, ppi, hpi, effr;
};

struct SocioTable {
  // keyed by month index, strictly increasing
  std::vector<std::pair<int, SocioRow>> rows;

  const SocioRow* find(int month_idx) const;
  static SocioTable load_csv(const std::string& path);
};

Frame load_csv(const std::string& path, const Schema& schema);

// Writes all columns of the frame as CSV (dates as YYYY-MM).
void write_csv(const Frame& frame, const std::string& path);

// Adds price_high_low = 1 iff price > aprtot (strict). Rows with a masked
// price or aprtot are dropped; the count of dropped rows is returned through
// rejected if non-null. Idempotent.
Frame derive_target(const Frame& frame, std::size_t* rejected = nullptr);

// Appends gdp,cpi,ppi,hpi,effr matched on year-month of sale_date. Throws
// listing the missing months if the socio table does not cover every sale.
Frame join_socio(const Frame& frame, const SocioTable& socio);

// Derives age, year_sale, month_sale from sale_date/yrblt and drops rows
// with masked cells in any model-input column. rejected reports the drop
// count.
Frame prepare(const Frame& frame, std::size_t* rejected = nullptr);

// Pearson correlation over the named numeric columns. Throws if a column is
// constant.
std::vector<std::vector<double>> pearson_matrix(
    const Frame& frame, const std::vector<std::string>& cols);

struct YearSummary {
  int year;
  std::size_t count;
  double positive_rate;
};

// Per-calendar-year sale counts and target-positive rates.
std::vector<YearSummary> summarize(const Frame& frame);

}  // namespace salecast
