#include "seadsc/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "seadsc/error.hpp"

namespace seadsc {
namespace {

double ratio_or_zero(std::uint64_t num, std::uint64_t den, bool& zero_division) {
  if (den == 0) {
    zero_division = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

double f1_score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(trimmed(line.substr(pos)));
      break;
    }
    fields.push_back(trimmed(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return fields;
}

long long parse_int(const std::string& field, int line_no) {
  try {
    std::size_t used = 0;
    const long long value = std::stoll(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line_no) + ": expected an integer, got '" + field +
                      "'");
  }
}

Label parse_label(const std::string& field, int line_no) {
  try {
    return label_from_string(field);
  } catch (const Error&) {
    throw FormatError("line " + std::to_string(line_no) + ": unknown label '" + field + "'");
  }
}

}  // namespace

Confusion confusion(const std::vector<Label>& ground_truth, const std::vector<Label>& predicted) {
  if (ground_truth.size() != predicted.size()) {
    throw DataError("label sequences differ in length: " + std::to_string(ground_truth.size()) +
                    " vs " + std::to_string(predicted.size()));
  }
  if (ground_truth.empty()) throw DataError("cannot evaluate an empty label sequence");

  Confusion counts;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    const bool gt_changed = ground_truth[i] == Label::changed;
    const bool pred_changed = predicted[i] == Label::changed;
    if (gt_changed && pred_changed) ++counts.changed_as_changed;
    if (gt_changed && !pred_changed) ++counts.changed_as_not;
    if (!gt_changed && pred_changed) ++counts.not_as_changed;
    if (!gt_changed && !pred_changed) ++counts.not_as_not;
  }
  return counts;
}

ClassificationReport report_from_confusion(const Confusion& counts) {
  const std::uint64_t total = counts.total();
  if (total == 0) throw DataError("cannot evaluate an empty confusion matrix");

  ClassificationReport rep;
  rep.confusion = counts;
  rep.total = total;

  rep.changed.support = counts.changed_as_changed + counts.changed_as_not;
  rep.changed.precision = ratio_or_zero(counts.changed_as_changed,
                                        counts.changed_as_changed + counts.not_as_changed,
                                        rep.zero_division);
  rep.changed.recall =
      ratio_or_zero(counts.changed_as_changed, rep.changed.support, rep.zero_division);
  rep.changed.f1 = f1_score(rep.changed.precision, rep.changed.recall);

  rep.not_changed.support = counts.not_as_changed + counts.not_as_not;
  rep.not_changed.precision = ratio_or_zero(
      counts.not_as_not, counts.not_as_not + counts.changed_as_not, rep.zero_division);
  rep.not_changed.recall =
      ratio_or_zero(counts.not_as_not, rep.not_changed.support, rep.zero_division);
  rep.not_changed.f1 = f1_score(rep.not_changed.precision, rep.not_changed.recall);

  rep.accuracy = static_cast<double>(counts.changed_as_changed + counts.not_as_not) /
                 static_cast<double>(total);

  rep.macro_avg.precision = (rep.changed.precision + rep.not_changed.precision) / 2.0;
  rep.macro_avg.recall = (rep.changed.recall + rep.not_changed.recall) / 2.0;
  rep.macro_avg.f1 = (rep.changed.f1 + rep.not_changed.f1) / 2.0;
  rep.macro_avg.support = total;

  const double w_changed = static_cast<double>(rep.changed.support);
  const double w_not = static_cast<double>(rep.not_changed.support);
  const double w_total = static_cast<double>(total);
  rep.weighted_avg.precision =
      (rep.changed.precision * w_changed + rep.not_changed.precision * w_not) / w_total;
  rep.weighted_avg.recall =
      (rep.changed.recall * w_changed + rep.not_changed.recall * w_not) / w_total;
  rep.weighted_avg.f1 = (rep.changed.f1 * w_changed + rep.not_changed.f1 * w_not) / w_total;
  rep.weighted_avg.support = total;

  return rep;
}

ClassificationReport report(const std::vector<Label>& ground_truth,
                            const std::vector<Label>& predicted) {
  return report_from_confusion(confusion(ground_truth, predicted));
}

std::string report_to_text(const ClassificationReport& rep) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);

  auto row = [&out](const std::string& name, double p, double r, double f1,
                    std::uint64_t support) {
    out << std::setw(14) << name << std::setw(11) << p << std::setw(9) << r << std::setw(10) << f1
        << std::setw(10) << support << "\n";
  };

  out << std::setw(14) << "" << std::setw(11) << "precision" << std::setw(9) << "recall"
      << std::setw(10) << "f1-score" << std::setw(10) << "support" << "\n\n";
  row("changed", rep.changed.precision, rep.changed.recall, rep.changed.f1, rep.changed.support);
  row("not_changed", rep.not_changed.precision, rep.not_changed.recall, rep.not_changed.f1,
      rep.not_changed.support);
  out << "\n";
  out << std::setw(14) << "accuracy" << std::setw(30) << rep.accuracy << std::setw(10) << rep.total
      << "\n";
  row("macro avg", rep.macro_avg.precision, rep.macro_avg.recall, rep.macro_avg.f1,
      rep.macro_avg.support);
  row("weighted avg", rep.weighted_avg.precision, rep.weighted_avg.recall, rep.weighted_avg.f1,
      rep.weighted_avg.support);
  if (rep.zero_division) {
    out << "\nwarning: a precision or recall denominator was zero; reported as 0.00\n";
  }
  return out.str();
}

std::string report_to_json(const ClassificationReport& rep) {
  auto metrics = [](const ClassMetrics& m) {
    return nlohmann::json{
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  };
  nlohmann::json doc{
      {"accuracy", rep.accuracy},
      {"total", rep.total},
      {"zero_division", rep.zero_division},
      {"changed", metrics(rep.changed)},
      {"not_changed", metrics(rep.not_changed)},
      {"macro_avg", metrics(rep.macro_avg)},
      {"weighted_avg", metrics(rep.weighted_avg)},
      {"confusion",
       {{"changed_as_changed", rep.confusion.changed_as_changed},
        {"changed_as_not", rep.confusion.changed_as_not},
        {"not_as_changed", rep.confusion.not_as_changed},
        {"not_as_not", rep.confusion.not_as_not}}},
  };
  return doc.dump(2);
}

std::vector<Label> read_ground_truth_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ground-truth file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty ground-truth file " + path.string());
  const std::string header = trimmed(line);

  int line_no = 1;
  if (header == "frame_index,label") {
    std::vector<std::pair<long long, Label>> rows;
    while (std::getline(in, line)) {
      ++line_no;
      if (trimmed(line).empty()) continue;
      const auto fields = split_fields(line);
      if (fields.size() != 2) {
        throw FormatError("line " + std::to_string(line_no) + ": expected 2 fields, got " +
                          std::to_string(fields.size()));
      }
      rows.emplace_back(parse_int(fields[0], line_no), parse_label(fields[1], line_no));
    }
    if (rows.empty()) throw DataError("ground-truth file has no rows: " + path.string());

    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Label> labels(rows.size(), Label::changed);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].first != static_cast<long long>(i)) {
        throw DataError("frame indices must cover 0.." + std::to_string(rows.size() - 1) +
                        " without gaps or duplicates; offending index " +
                        std::to_string(rows[i].first));
      }
      labels[i] = rows[i].second;
    }
    return labels;
  }

  if (header == "start_frame,end_frame_exclusive,label") {
    struct Segment {
      long long start, end;
      Label label;
    };
    std::vector<Segment> segments;
    while (std::getline(in, line)) {
      ++line_no;
      if (trimmed(line).empty()) continue;
      const auto fields = split_fields(line);
      if (fields.size() != 3) {
        throw FormatError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                          std::to_string(fields.size()));
      }
      Segment seg{parse_int(fields[0], line_no), parse_int(fields[1], line_no),
                  parse_label(fields[2], line_no)};
      if (seg.start < 0 || seg.end <= seg.start) {
        throw DataError("line " + std::to_string(line_no) + ": bad segment [" +
                        std::to_string(seg.start) + ", " + std::to_string(seg.end) + ")");
      }
      segments.push_back(seg);
    }
    if (segments.empty()) throw DataError("ground-truth file has no rows: " + path.string());

    std::sort(segments.begin(), segments.end(),
              [](const Segment& a, const Segment& b) { return a.start < b.start; });
    long long expected = 0;
    for (const Segment& seg : segments) {
      if (seg.start != expected) {
        throw DataError("segments must tile [0, n) without gaps or overlaps; expected start " +
                        std::to_string(expected) + ", got " + std::to_string(seg.start));
      }
      expected = seg.end;
    }

    std::vector<Label> labels;
    labels.reserve(static_cast<std::size_t>(expected));
    for (const Segment& seg : segments) {
      labels.insert(labels.end(), static_cast<std::size_t>(seg.end - seg.start), seg.label);
    }
    return labels;
  }

  throw FormatError("unrecognized ground-truth header '" + header +
                    "'; expected 'frame_index,label' or 'start_frame,end_frame_exclusive,label'");
}

}  // namespace seadsc
