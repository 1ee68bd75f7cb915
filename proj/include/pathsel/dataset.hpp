#pragma once

#include "pathsel/common.hpp"
#include "pathsel/membership.hpp"

#include <string>
#include <vector>

namespace pathsel {

enum class OutcomeKind { continuous, survival };

// Expression matrix plus response, aligned to the membership's gene order.
// `expression` is column-centered; `column_means` holds the subtracted means
// so a test set can be re-centered with training means at prediction time.
// For survival outcomes `response` holds log event/censoring times and
// `censoring[i] == 1` marks an observed event (0 = right-censored).
struct Dataset {
  int n_samples = 0;
  std::vector<std::string> sample_ids;
  Matrix expression;     // n_samples x n_genes, column means removed
  Vector column_means;   // n_genes
  Vector response;       // y, or log(time) under survival
  std::vector<std::uint8_t> censoring;  // empty unless survival
  OutcomeKind outcome_kind = OutcomeKind::continuous;

  int n_genes() const { return static_cast<int>(expression.cols()); }
};

// Builds a dataset from raw (uncentered) expression and response values.
// Survival responses are raw times (> 0 required); they are logged here.
Dataset make_dataset(std::vector<std::string> sample_ids, const Matrix& raw_expression,
                     const Vector& raw_response, const std::vector<std::uint8_t>& censoring,
                     OutcomeKind kind);

// Loads expression (delimited, header = "sample_id" + gene ids) and response
// (header = "sample_id,y" or "sample_id,y,delta") files.  The expression
// header must contain exactly the membership's genes (any order); rows of the
// two files are matched by sample id.  A delta column implies a survival
// outcome.  Missing values, NaNs, non-positive survival times, and unknown or
// duplicate ids are rejected.
Dataset load_dataset(const std::string& expression_path, const std::string& response_path,
                     const PathwayMembership& membership);

// An expression file alone (same format and validation as the expression
// input of load_dataset): raw, uncentered values in membership gene order.
// Used for test sets that have no response.
struct ExpressionTable {
  std::vector<std::string> sample_ids;
  Matrix values;  // n_samples x n_genes
};
ExpressionTable load_expression(const std::string& path, const PathwayMembership& membership);

// Row subset (samples re-centered with their own means, keeping the invariant
// that expression columns of any Dataset sum to zero).
Dataset subset(const Dataset& data, const std::vector<int>& rows);

// Random train/test partition of the given sizes.  Under a survival outcome
// the split is stratified by censoring status so event rates stay balanced.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, int n_train, Rng& rng);

// Raw (uncentered) expression of a dataset, i.e. expression + column_means.
Matrix raw_expression(const Dataset& data);

}  // namespace pathsel
