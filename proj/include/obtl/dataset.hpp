#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace obtl {

/// One domain's labeled samples. Rows of X are samples, labels are 1-based.
struct LabeledDataset {
  Eigen::MatrixXd X;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::string domain;  // "source" | "target" | ""

  int n() const { return static_cast<int>(X.rows()); }
  int dim() const { return static_cast<int>(X.cols()); }
};

/// Parses a headered CSV. The column named label_column holds integer class
/// labels; every other column is a numeric feature. Errors carry line numbers.
LabeledDataset ingest_csv(const std::string& path,
                          const std::string& label_column = "label");

/// Throws DataError if any label falls outside 1..L.
void validate_labels(const LabeledDataset& ds, int num_classes);

/// Writes a CSV that ingest_csv round-trips bit-exactly for finite values.
void write_csv(const LabeledDataset& ds, const std::string& path,
               const std::string& label_column = "label");

/// Per-class row blocks; index l holds rows with label l+1.
std::vector<Eigen::MatrixXd> split_by_class(const LabeledDataset& ds, int num_classes);

enum class PcaPooling { kPooled, kTargetOnly };

/// Per-feature standardization followed by projection onto leading principal
/// components, both fit on training data only.
struct Preprocessor {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  Eigen::MatrixXd components;  // d x d_out

  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
};

Preprocessor fit_preprocessor(const Eigen::MatrixXd& fit_data, int d_out,
                              const std::vector<std::string>& feature_names);

struct PreprocessedData {
  LabeledDataset train_s;
  LabeledDataset train_t;
  LabeledDataset test_t;
};

PreprocessedData preprocess(const LabeledDataset& train_s, const LabeledDataset& train_t,
                            const LabeledDataset& test_t, int d_out,
                            PcaPooling pooling = PcaPooling::kPooled);

}  // namespace obtl
