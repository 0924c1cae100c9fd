#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seadsc/label.hpp"

namespace seadsc {

/// 2x2 confusion counts, indexed by (ground truth, prediction).
struct Confusion {
  std::uint64_t changed_as_changed = 0;      // gt changed, pred changed
  std::uint64_t changed_as_not = 0;          // gt changed, pred not_changed
  std::uint64_t not_as_changed = 0;          // gt not_changed, pred changed
  std::uint64_t not_as_not = 0;              // gt not_changed, pred not_changed

  std::uint64_t total() const {
    return changed_as_changed + changed_as_not + not_as_changed + not_as_not;
  }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

/// Two-class classification report: per-class metrics, accuracy, macro and
/// support-weighted averages, and the confusion matrix they derive from.
struct ClassificationReport {
  ClassMetrics changed;
  ClassMetrics not_changed;
  ClassMetrics macro_avg;     // unweighted class mean, support = total
  ClassMetrics weighted_avg;  // support-weighted class mean, support = total
  double accuracy = 0.0;
  std::uint64_t total = 0;
  Confusion confusion;
  bool zero_division = false;  // some precision/recall had a zero denominator
};

/// Counts the 2x2 confusion matrix. Throws DataError on length mismatch or
/// empty input.
Confusion confusion(const std::vector<Label>& ground_truth, const std::vector<Label>& predicted);

/// Full report. Precision/recall with a zero denominator are reported as 0
/// and flip the zero_division flag; F1 is 0 when both components are 0.
ClassificationReport report(const std::vector<Label>& ground_truth,
                            const std::vector<Label>& predicted);

/// Recomputes all metrics from an existing confusion matrix.
ClassificationReport report_from_confusion(const Confusion& counts);

/// Aligned plain-text table: one row per class, then accuracy, macro average
/// and weighted average.
std::string report_to_text(const ClassificationReport& rep);

/// JSON rendering of the report (pretty-printed).
std::string report_to_json(const ClassificationReport& rep);

/// Reads per-frame ground truth. Accepts the per-frame form with header
/// "frame_index,label" (one row per frame 0..n-1, any order, no gaps or
/// duplicates) and the segment form with header
/// "start_frame,end_frame_exclusive,label" (segments covering [0, n) without
/// gaps or overlaps). Labels are "changed" / "not_changed".
std::vector<Label> read_ground_truth_csv(const std::filesystem::path& path);

}  // namespace seadsc
