#include "obtl/dataset.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "obtl/errors.hpp"

namespace obtl {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& cell, const std::string& path, int line_no,
                    const std::string& column) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != cell.size() || cell.empty())
    throw DataError(path + ":" + std::to_string(line_no) + ": non-numeric value '" + cell +
                    "' in column '" + column + "'");
  return v;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LabeledDataset ingest_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);

  int label_idx = -1;
  LabeledDataset ds;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column)
      label_idx = static_cast<int>(j);
    else
      ds.feature_names.push_back(header[j]);
  }
  if (label_idx < 0)
    throw DataError(path + ": header has no '" + label_column + "' column");
  const int d = static_cast<int>(ds.feature_names.size());
  if (d == 0) throw DataError(path + ": no feature columns");

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(d);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (static_cast<int>(j) == label_idx) continue;
      double v = parse_number(cells[j], path, line_no, header[j]);
      if (!std::isfinite(v))
        throw DataError(path + ":" + std::to_string(line_no) + ": non-finite value in column '" +
                        header[j] + "'");
      row.push_back(v);
    }
    const std::string& lc = cells[label_idx];
    double lv = parse_number(lc, path, line_no, label_column);
    int label = static_cast<int>(lv);
    if (lv != label)
      throw DataError(path + ":" + std::to_string(line_no) + ": label '" + lc +
                      "' is not an integer");
    ds.labels.push_back(label);
    rows.push_back(std::move(row));
  }

  ds.X.resize(static_cast<int>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < d; ++j) ds.X(static_cast<int>(i), j) = rows[i][j];
  return ds;
}

void validate_labels(const LabeledDataset& ds, int num_classes) {
  for (std::size_t i = 0; i < ds.labels.size(); ++i)
    if (ds.labels[i] < 1 || ds.labels[i] > num_classes)
      throw DataError("row " + std::to_string(i + 1) + ": label " +
                      std::to_string(ds.labels[i]) + " outside 1.." +
                      std::to_string(num_classes));
}

void write_csv(const LabeledDataset& ds, const std::string& path,
               const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << label_column;
  for (int j = 0; j < ds.dim(); ++j) {
    out << ',';
    if (j < static_cast<int>(ds.feature_names.size()))
      out << ds.feature_names[j];
    else
      out << 'f' << j + 1;
  }
  out << '\n';
  for (int i = 0; i < ds.n(); ++i) {
    out << ds.labels[i];
    for (int j = 0; j < ds.dim(); ++j) out << ',' << format_value(ds.X(i, j));
    out << '\n';
  }
}

std::vector<Eigen::MatrixXd> split_by_class(const LabeledDataset& ds, int num_classes) {
  validate_labels(ds, num_classes);
  std::vector<std::vector<int>> rows(num_classes);
  for (int i = 0; i < ds.n(); ++i) rows[ds.labels[i] - 1].push_back(i);
  std::vector<Eigen::MatrixXd> out;
  for (int l = 0; l < num_classes; ++l) {
    Eigen::MatrixXd m(static_cast<int>(rows[l].size()), ds.dim());
    for (std::size_t i = 0; i < rows[l].size(); ++i) m.row(static_cast<int>(i)) = ds.X.row(rows[l][i]);
    out.push_back(std::move(m));
  }
  return out;
}

Eigen::MatrixXd Preprocessor::transform(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd Z =
      (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  return Z * components;
}

Preprocessor fit_preprocessor(const Eigen::MatrixXd& fit_data, int d_out,
                              const std::vector<std::string>& feature_names) {
  const int n = static_cast<int>(fit_data.rows());
  const int d = static_cast<int>(fit_data.cols());
  if (n < 2) throw DataError("preprocessing needs at least 2 training rows");
  if (d_out < 1 || d_out > d)
    throw DataError("d_out must be in 1.." + std::to_string(d));

  Preprocessor p;
  p.mean = fit_data.colwise().mean();
  Eigen::MatrixXd centered = fit_data.rowwise() - p.mean.transpose();
  p.scale = (centered.array().square().colwise().sum() / (n - 1)).sqrt();
  for (int j = 0; j < d; ++j) {
    if (!(p.scale(j) > 0.0)) {
      std::string name = j < static_cast<int>(feature_names.size())
                             ? feature_names[j]
                             : "f" + std::to_string(j + 1);
      throw DataError("constant feature '" + name + "' cannot be standardized");
    }
  }

  Eigen::MatrixXd Z = centered.array().rowwise() / p.scale.transpose().array();
  Eigen::MatrixXd cov = Z.transpose() * Z / (n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw DataError("PCA eigendecomposition failed");

  // eigenvalues come out ascending; take the top d_out
  const Eigen::VectorXd& ev = es.eigenvalues();
  double rank_tol = 1e-12 * std::max(ev(d - 1), 1.0);
  p.components.resize(d, d_out);
  for (int j = 0; j < d_out; ++j) {
    int src = d - 1 - j;
    if (ev(src) <= rank_tol)
      throw DataError("rank deficient: fewer than " + std::to_string(d_out) +
                      " informative directions");
    Eigen::VectorXd comp = es.eigenvectors().col(src);
    // deterministic sign: largest-magnitude entry positive
    int imax = 0;
    comp.cwiseAbs().maxCoeff(&imax);
    if (comp(imax) < 0.0) comp = -comp;
    p.components.col(j) = comp;
  }
  return p;
}

PreprocessedData preprocess(const LabeledDataset& train_s, const LabeledDataset& train_t,
                            const LabeledDataset& test_t, int d_out, PcaPooling pooling) {
  const int d = train_t.dim();
  if (train_s.dim() != d || test_t.dim() != d)
    throw DataError("preprocess: datasets disagree on feature dimension");

  Eigen::MatrixXd fit_data;
  if (pooling == PcaPooling::kPooled) {
    fit_data.resize(train_s.n() + train_t.n(), d);
    fit_data.topRows(train_s.n()) = train_s.X;
    fit_data.bottomRows(train_t.n()) = train_t.X;
  } else {
    fit_data = train_t.X;
  }
  Preprocessor p = fit_preprocessor(fit_data, d_out, train_t.feature_names);

  std::vector<std::string> names;
  for (int j = 0; j < d_out; ++j) names.push_back("pc" + std::to_string(j + 1));
  auto apply = [&](const LabeledDataset& ds) {
    LabeledDataset out;
    out.X = p.transform(ds.X);
    out.labels = ds.labels;
    out.feature_names = names;
    out.domain = ds.domain;
    return out;
  };
  return {apply(train_s), apply(train_t), apply(test_t)};
}

}  // namespace obtl
