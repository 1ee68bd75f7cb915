#include "pathsel/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace pathsel {

namespace {

// Splits a delimited line; the delimiter is sniffed from the header (comma or
// tab), so both CSV and TSV inputs work.
std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

char sniff_delim(const std::string& header) {
  return header.find('\t') != std::string::npos ? '\t' : ',';
}

double parse_value(const std::string& field, const std::string& where) {
  if (field.empty()) throw DataError(where + ": missing value");
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw DataError(where + ": cannot parse value '" + field + "'");
  }
  if (pos != field.size()) throw DataError(where + ": cannot parse value '" + field + "'");
  if (!std::isfinite(v)) throw DataError(where + ": non-finite value '" + field + "'");
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

Dataset make_dataset(std::vector<std::string> sample_ids, const Matrix& raw_expression,
                     const Vector& raw_response, const std::vector<std::uint8_t>& censoring,
                     OutcomeKind kind) {
  const int n = static_cast<int>(raw_expression.rows());
  if (static_cast<int>(sample_ids.size()) != n || raw_response.size() != n)
    throw DataError("sample count mismatch between expression and response");
  if (kind == OutcomeKind::survival && static_cast<int>(censoring.size()) != n)
    throw DataError("survival outcome requires one censoring flag per sample");
  if (kind == OutcomeKind::continuous && !censoring.empty())
    throw DataError("censoring flags given for a continuous outcome");
  if (n < 2) throw DataError("need at least two samples");

  Dataset d;
  d.n_samples = n;
  d.sample_ids = std::move(sample_ids);
  d.column_means = raw_expression.colwise().mean();
  d.expression = raw_expression.rowwise() - d.column_means.transpose();
  d.outcome_kind = kind;
  d.censoring = censoring;
  if (kind == OutcomeKind::survival) {
    for (int i = 0; i < n; ++i)
      if (!(raw_response[i] > 0))
        throw DataError("survival time must be positive (sample " + d.sample_ids[i] + ")");
    d.response = raw_response.array().log();
  } else {
    d.response = raw_response;
  }
  return d;
}

ExpressionTable load_expression(const std::string& path, const PathwayMembership& membership) {
  std::ifstream xin(path);
  if (!xin) throw DataError("cannot open expression file: " + path);
  std::string line;
  if (!std::getline(xin, line)) throw DataError("empty expression file: " + path);
  line = strip_cr(line);
  const char xdelim = sniff_delim(line);
  const auto header = split_fields(line, xdelim);
  if (header.size() < 2 || header[0] != "sample_id")
    throw DataError(path + ": header must start with 'sample_id'");

  const int p = membership.n_genes;
  if (static_cast<int>(header.size()) - 1 != p)
    throw DataError(path + ": expected " + std::to_string(p) + " gene columns, found " +
                    std::to_string(header.size() - 1));
  std::vector<int> col_to_gene(header.size() - 1);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(p), 0);
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto it = membership.gene_index.find(header[c]);
    if (it == membership.gene_index.end())
      throw DataError(path + ": unknown gene id '" + header[c] + "' in header");
    if (seen[it->second])
      throw DataError(path + ": duplicate gene column '" + header[c] + "'");
    seen[it->second] = 1;
    col_to_gene[c - 1] = it->second;
  }

  ExpressionTable table;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, int> sample_index;
  int line_no = 1;
  while (std::getline(xin, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line, xdelim);
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields");
    if (sample_index.count(fields[0]))
      throw DataError(where + ": duplicate sample id '" + fields[0] + "'");
    sample_index[fields[0]] = static_cast<int>(table.sample_ids.size());
    table.sample_ids.push_back(fields[0]);
    std::vector<double> row(static_cast<std::size_t>(p));
    for (std::size_t c = 1; c < fields.size(); ++c)
      row[static_cast<std::size_t>(col_to_gene[c - 1])] = parse_value(fields[c], where);
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw DataError(path + ": no sample rows");

  table.values = Matrix(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j)
      table.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return table;
}

Dataset load_dataset(const std::string& expression_path, const std::string& response_path,
                     const PathwayMembership& membership) {
  ExpressionTable table = load_expression(expression_path, membership);
  std::vector<std::string>& sample_ids = table.sample_ids;
  const Matrix& raw = table.values;
  const int n = static_cast<int>(raw.rows());
  std::unordered_map<std::string, int> sample_index;
  for (int i = 0; i < n; ++i) sample_index[sample_ids[static_cast<std::size_t>(i)]] = i;

  std::string line;
  std::ifstream yin(response_path);
  if (!yin) throw DataError("cannot open response file: " + response_path);
  if (!std::getline(yin, line)) throw DataError("empty response file: " + response_path);
  line = strip_cr(line);
  const char ydelim = sniff_delim(line);
  const auto yheader = split_fields(line, ydelim);
  bool has_delta;
  if (yheader.size() == 2 && yheader[0] == "sample_id" && yheader[1] == "y") has_delta = false;
  else if (yheader.size() == 3 && yheader[0] == "sample_id" && yheader[1] == "y" && yheader[2] == "delta")
    has_delta = true;
  else
    throw DataError(response_path + ": header must be 'sample_id,y' or 'sample_id,y,delta'");

  Vector y(n);
  std::vector<std::uint8_t> delta(has_delta ? static_cast<std::size_t>(n) : 0);
  std::vector<std::uint8_t> got(static_cast<std::size_t>(n), 0);
  int line_no = 1;
  while (std::getline(yin, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line, ydelim);
    const std::string where = response_path + ":" + std::to_string(line_no);
    if (fields.size() != yheader.size())
      throw DataError(where + ": expected " + std::to_string(yheader.size()) + " fields");
    const auto it = sample_index.find(fields[0]);
    if (it == sample_index.end())
      throw DataError(where + ": sample id '" + fields[0] + "' not present in expression file");
    if (got[it->second]) throw DataError(where + ": duplicate sample id '" + fields[0] + "'");
    got[it->second] = 1;
    y[it->second] = parse_value(fields[1], where);
    if (has_delta) {
      const double dv = parse_value(fields[2], where);
      if (dv != 0.0 && dv != 1.0) throw DataError(where + ": delta must be 0 or 1");
      delta[static_cast<std::size_t>(it->second)] = static_cast<std::uint8_t>(dv);
    }
  }
  for (int i = 0; i < n; ++i)
    if (!got[i]) throw DataError(response_path + ": no response for sample '" + sample_ids[i] + "'");

  return make_dataset(std::move(sample_ids), raw, y, delta,
                      has_delta ? OutcomeKind::survival : OutcomeKind::continuous);
}

Matrix raw_expression(const Dataset& data) {
  return data.expression.rowwise() + data.column_means.transpose();
}

Dataset subset(const Dataset& data, const std::vector<int>& rows) {
  if (rows.empty()) throw DataError("subset with no rows");
  const Matrix raw = raw_expression(data);
  Matrix sub_raw(static_cast<int>(rows.size()), data.n_genes());
  Vector y(static_cast<int>(rows.size()));
  std::vector<std::string> ids;
  std::vector<std::uint8_t> delta;
  ids.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int i = rows[r];
    if (i < 0 || i >= data.n_samples) throw DataError("subset row out of range");
    sub_raw.row(static_cast<int>(r)) = raw.row(i);
    y[static_cast<int>(r)] = data.response[i];
    ids.push_back(data.sample_ids[static_cast<std::size_t>(i)]);
    if (data.outcome_kind == OutcomeKind::survival)
      delta.push_back(data.censoring[static_cast<std::size_t>(i)]);
  }
  if (data.outcome_kind == OutcomeKind::survival)
    // response already holds log times; exponentiate so make_dataset can log again
    y = y.array().exp();
  return make_dataset(std::move(ids), sub_raw, y, delta, data.outcome_kind);
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, int n_train, Rng& rng) {
  if (n_train <= 1 || n_train >= data.n_samples - 1)
    throw DataError("train size must leave at least two samples on each side");

  std::vector<int> order(static_cast<std::size_t>(data.n_samples));
  std::iota(order.begin(), order.end(), 0);

  std::vector<int> train, test;
  if (data.outcome_kind == OutcomeKind::survival) {
    // stratify by censoring status so event rates stay balanced
    std::vector<int> events, censored;
    for (int i : order) (data.censoring[static_cast<std::size_t>(i)] ? events : censored).push_back(i);
    std::shuffle(events.begin(), events.end(), rng);
    std::shuffle(censored.begin(), censored.end(), rng);
    const double frac = static_cast<double>(n_train) / data.n_samples;
    int take_events = static_cast<int>(std::lround(frac * static_cast<double>(events.size())));
    take_events = std::min(take_events, static_cast<int>(events.size()));
    int take_censored = n_train - take_events;
    if (take_censored > static_cast<int>(censored.size())) {
      take_events += take_censored - static_cast<int>(censored.size());
      take_censored = static_cast<int>(censored.size());
    }
    train.insert(train.end(), events.begin(), events.begin() + take_events);
    train.insert(train.end(), censored.begin(), censored.begin() + take_censored);
    test.insert(test.end(), events.begin() + take_events, events.end());
    test.insert(test.end(), censored.begin() + take_censored, censored.end());
  } else {
    std::shuffle(order.begin(), order.end(), rng);
    train.assign(order.begin(), order.begin() + n_train);
    test.assign(order.begin() + n_train, order.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {subset(data, train), subset(data, test)};
}

}  // namespace pathsel
