#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "bcd/changegrid.hpp"

namespace bcd {

/// Square count table over a label alphabet; rows are predicted labels,
/// columns are truth labels. ConfusionMatrix3 / ConfusionMatrix2 are the
/// {SI, SD, AU} and {C, UC} instances.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<ChangeLabel> labels);
  ConfusionMatrix(std::vector<ChangeLabel> labels,
                  std::vector<std::vector<std::int64_t>> counts);

  const std::vector<ChangeLabel>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  std::int64_t count(std::size_t predicted, std::size_t truth) const {
    return counts_[predicted][truth];
  }
  void add(ChangeLabel predicted, ChangeLabel truth);

  std::int64_t total() const;
  std::int64_t trace() const;
  std::int64_t row_total(std::size_t predicted) const;
  std::int64_t column_total(std::size_t truth) const;

  /// 100 * trace / total. Throws ValidationError on an empty matrix.
  double overall_accuracy() const;
  /// 100 * diagonal / row total; absent for rows never predicted.
  std::optional<double> row_accuracy(std::size_t predicted) const;
  /// 100 * diagonal / column total; absent for empty columns.
  std::optional<double> column_accuracy(std::size_t truth) const;

  /// Same counts with the label order permuted (perm[i] = old index of new i).
  ConfusionMatrix permuted(const std::vector<std::size_t>& perm) const;

 private:
  std::size_t index_of(ChangeLabel label) const;

  std::vector<ChangeLabel> labels_;
  std::vector<std::vector<std::int64_t>> counts_;
};

/// Per-cell truth, keyed by (row, col).
using TruthLabels = std::map<std::pair<int, int>, ChangeLabel>;

/// Throws ValidationError listing missing cells, or on a truth label outside
/// the map's alphabet.
ConfusionMatrix confusion(const GridChangeMap& predicted, const TruthLabels& truth);

struct SweepRow {
  double change_threshold = 0;
  double overall_accuracy = 0;
};

/// Overall accuracy of the ratio classifier for each T, in input order.
std::vector<SweepRow> t_sweep(const BuildingMask& t1, const BuildingMask& t2,
                              const TruthLabels& truth, const ChangeConfig& cfg,
                              const std::vector<double>& t_values);

}  // namespace bcd
