#include "bcd/eval.hpp"

#include <algorithm>
#include <sstream>

#include "bcd/error.hpp"

namespace bcd {

ConfusionMatrix::ConfusionMatrix(std::vector<ChangeLabel> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("confusion matrix needs labels");
  counts_.assign(labels_.size(), std::vector<std::int64_t>(labels_.size(), 0));
}

ConfusionMatrix::ConfusionMatrix(std::vector<ChangeLabel> labels,
                                 std::vector<std::vector<std::int64_t>> counts)
    : ConfusionMatrix(std::move(labels)) {
  if (counts.size() != labels_.size()) throw ValidationError("confusion counts shape mismatch");
  for (const auto& row : counts) {
    if (row.size() != labels_.size()) throw ValidationError("confusion counts shape mismatch");
    for (auto v : row) {
      if (v < 0) throw ValidationError("negative confusion count");
    }
  }
  counts_ = std::move(counts);
}

std::size_t ConfusionMatrix::index_of(ChangeLabel label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw ValidationError("label " + std::string(to_string(label)) + " outside alphabet");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

void ConfusionMatrix::add(ChangeLabel predicted, ChangeLabel truth) {
  ++counts_[index_of(predicted)][index_of(truth)];
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t n = 0;
  for (const auto& row : counts_) {
    for (auto v : row) n += v;
  }
  return n;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < size(); ++i) n += counts_[i][i];
  return n;
}

std::int64_t ConfusionMatrix::row_total(std::size_t predicted) const {
  std::int64_t n = 0;
  for (auto v : counts_[predicted]) n += v;
  return n;
}

std::int64_t ConfusionMatrix::column_total(std::size_t truth) const {
  std::int64_t n = 0;
  for (const auto& row : counts_) n += row[truth];
  return n;
}

double ConfusionMatrix::overall_accuracy() const {
  const auto n = total();
  if (n == 0) throw ValidationError("overall accuracy of an empty confusion matrix");
  return 100.0 * static_cast<double>(trace()) / static_cast<double>(n);
}

std::optional<double> ConfusionMatrix::row_accuracy(std::size_t predicted) const {
  const auto n = row_total(predicted);
  if (n == 0) return std::nullopt;
  return 100.0 * static_cast<double>(counts_[predicted][predicted]) / static_cast<double>(n);
}

std::optional<double> ConfusionMatrix::column_accuracy(std::size_t truth) const {
  const auto n = column_total(truth);
  if (n == 0) return std::nullopt;
  return 100.0 * static_cast<double>(counts_[truth][truth]) / static_cast<double>(n);
}

ConfusionMatrix ConfusionMatrix::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != size()) throw ValidationError("permutation size mismatch");
  std::vector<ChangeLabel> labels;
  std::vector<std::vector<std::int64_t>> counts(size(), std::vector<std::int64_t>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    labels.push_back(labels_.at(perm[i]));
    for (std::size_t j = 0; j < size(); ++j) counts[i][j] = counts_[perm[i]][perm.at(j)];
  }
  return ConfusionMatrix(std::move(labels), std::move(counts));
}

ConfusionMatrix confusion(const GridChangeMap& predicted, const TruthLabels& truth) {
  const auto alphabet = label_alphabet(predicted.method);
  ConfusionMatrix matrix(alphabet);

  std::ostringstream missing;
  int n_missing = 0;
  for (const GridCell& cell : predicted.cells) {
    if (!truth.contains({cell.row, cell.col})) {
      missing << (n_missing++ ? " " : "") << '(' << cell.row << ',' << cell.col << ')';
    }
  }
  if (n_missing > 0) {
    throw ValidationError("truth labels missing for " + std::to_string(n_missing) +
                          " cell(s): " + missing.str());
  }
  const int n = predicted.n_segments();
  for (const auto& [key, label] : truth) {
    if (key.first < 0 || key.first >= n || key.second < 0 || key.second >= n) {
      throw ValidationError("truth cell (" + std::to_string(key.first) + "," +
                            std::to_string(key.second) + ") outside the grid");
    }
    if (std::find(alphabet.begin(), alphabet.end(), label) == alphabet.end()) {
      throw ValidationError("truth label " + std::string(to_string(label)) +
                            " does not match the " + std::string(to_string(predicted.method)) +
                            " alphabet");
    }
  }
  for (const GridCell& cell : predicted.cells) {
    matrix.add(cell.label, truth.at({cell.row, cell.col}));
  }
  return matrix;
}

std::vector<SweepRow> t_sweep(const BuildingMask& t1, const BuildingMask& t2,
                              const TruthLabels& truth, const ChangeConfig& cfg,
                              const std::vector<double>& t_values) {
  ChangeConfig base = cfg;
  for (double t : t_values) {
    base.change_threshold = t;
    base.validate();
  }
  base.change_threshold = cfg.change_threshold;
  const GridChangeMap counted = change_map(t1, t2, base);
  std::vector<SweepRow> rows;
  rows.reserve(t_values.size());
  for (double t : t_values) {
    ChangeConfig c = cfg;
    c.change_threshold = t;
    rows.push_back({t, confusion(relabel(counted, c), truth).overall_accuracy()});
  }
  return rows;
}

}  // namespace bcd
