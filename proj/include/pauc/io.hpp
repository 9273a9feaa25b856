#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "pauc/bias.hpp"
#include "pauc/dataset.hpp"
#include "pauc/experiments.hpp"
#include "pauc/pinning.hpp"

// Dataset files and report serialization.
//
// Dataset formats (documented in docs/formats.md):
//   csv    header `id,score,label,subgroups,text`, RFC-4180 quoting,
//          subgroups pipe-separated, empty score = not yet scored
//   jsonl  one object per line, same field names, subgroups as an array
//
// Report writers are deterministic: fixed field order, metric values at
// six decimal places in csv, absent metrics as explicit nulls with a
// machine-readable reason code. Identical inputs produce byte-identical
// files.

namespace pauc::io {

using json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  ParseError(const std::string& message, std::size_t line_number)
      : std::runtime_error("line " + std::to_string(line_number) + ": " +
                           message),
        line(line_number) {}
  std::size_t line;
};

// One data-file row; score is optional so unscored sets can round-trip
// through the `score` command.
struct ScoredRecordRow {
  std::string id;
  std::optional<double> score;
  int label = 0;  // 0 = negative, 1 = positive
  std::vector<std::string> subgroups;
  std::string text;
  std::size_t line = 0;  // source line, for error reporting
};

enum class DataFormat { csv, jsonl };
enum class ReportFormat { csv, json };

inline DataFormat parse_data_format(std::string_view name) {
  if (name == "csv") return DataFormat::csv;
  if (name == "jsonl") return DataFormat::jsonl;
  throw std::invalid_argument("unknown data format: " + std::string(name));
}

inline ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format: " + std::string(name));
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

// --- csv ---

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // line the record starts on, 1-based
};

// RFC-4180: quoted fields may contain commas, doubled quotes and
// newlines; records end on an unquoted newline.
inline std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    CsvRecord record;
    record.line = line;
    std::string field;
    bool quoted = false;
    for (;; ++i) {
      if (i >= text.size()) {
        if (quoted) throw ParseError("unterminated quoted field", record.line);
        record.fields.push_back(std::move(field));
        break;
      }
      const char c = text[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
      } else if (c == '"') {
        if (!field.empty()) throw ParseError("stray quote in field", line);
        quoted = true;
      } else if (c == ',') {
        record.fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n' || c == '\r') {
        record.fields.push_back(std::move(field));
        if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
        ++i;
        ++line;
        break;
      } else {
        field.push_back(c);
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

inline std::string csv_escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// shortest round-trip representation, locale-free
inline std::string format_double(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buffer, ptr);
}

// report metric formatting: fixed six decimals
inline std::string format_metric(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return std::string(buffer);
}

inline double parse_double(std::string_view text, std::size_t line,
                           std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("invalid " + std::string(what) + ": '" +
                         std::string(text) + "'",
                     line);
  }
  return value;
}

inline std::vector<std::string> split_tags(std::string_view joined,
                                           std::size_t line) {
  std::vector<std::string> tags;
  if (joined.empty()) return tags;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = joined.find('|', start);
    const std::string_view tag = joined.substr(
        start, sep == std::string_view::npos ? sep : sep - start);
    if (tag.empty()) throw ParseError("empty subgroup tag", line);
    tags.emplace_back(tag);
    if (sep == std::string_view::npos) break;
    start = sep + 1;
  }
  return tags;
}

inline void validate_tags(const std::vector<std::string>& tags,
                          std::size_t line) {
  for (const auto& tag : tags) {
    if (tag.empty()) throw ParseError("empty subgroup tag", line);
    if (tag.find('|') != std::string::npos) {
      throw ParseError("subgroup tag contains '|': " + tag, line);
    }
  }
}

inline constexpr std::string_view kDatasetHeader = "id,score,label,subgroups,text";

}  // namespace detail

inline std::vector<ScoredRecordRow> read_rows(const std::string& path,
                                              DataFormat format) {
  const std::string content = detail::read_file(path);
  std::vector<ScoredRecordRow> rows;

  if (format == DataFormat::csv) {
    const auto records = detail::parse_csv(content);
    if (records.empty()) throw ParseError("missing header", 1);
    const auto& header = records.front();
    const std::vector<std::string> expected = {"id", "score", "label",
                                               "subgroups", "text"};
    if (header.fields != expected) {
      throw ParseError("header must be '" +
                           std::string(detail::kDatasetHeader) + "'",
                       header.line);
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& record = records[r];
      if (record.fields.size() == 1 && record.fields[0].empty()) continue;
      if (record.fields.size() != 5) {
        throw ParseError("expected 5 fields, got " +
                             std::to_string(record.fields.size()),
                         record.line);
      }
      ScoredRecordRow row;
      row.line = record.line;
      row.id = record.fields[0];
      if (!record.fields[1].empty()) {
        row.score = detail::parse_double(record.fields[1], record.line, "score");
      }
      const std::string& label = record.fields[2];
      if (label != "0" && label != "1") {
        throw ParseError("label must be 0 or 1, got '" + label + "'",
                         record.line);
      }
      row.label = label == "1" ? 1 : 0;
      row.subgroups = detail::split_tags(record.fields[3], record.line);
      row.text = record.fields[4];
      rows.push_back(std::move(row));
    }
    return rows;
  }

  // jsonl
  std::size_t line = 0;
  std::istringstream in{content};
  for (std::string raw; std::getline(in, raw);) {
    ++line;
    if (raw.empty()) continue;
    json object;
    try {
      object = json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid json: ") + e.what(), line);
    }
    if (!object.is_object()) throw ParseError("expected a json object", line);
    ScoredRecordRow row;
    row.line = line;
    try {
      row.id = object.at("id").get<std::string>();
      const int label = object.at("label").get<int>();
      if (label != 0 && label != 1) {
        throw ParseError("label must be 0 or 1", line);
      }
      row.label = label;
      if (object.contains("score") && !object["score"].is_null()) {
        row.score = object["score"].get<double>();
      }
      if (object.contains("subgroups")) {
        row.subgroups = object["subgroups"].get<std::vector<std::string>>();
      }
      if (object.contains("text") && !object["text"].is_null()) {
        row.text = object["text"].get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad record: ") + e.what(), line);
    }
    detail::validate_tags(row.subgroups, line);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Rows -> Dataset. Scores are required (and range-checked) unless the
// caller is about to assign them.
inline Dataset rows_to_dataset(const std::vector<ScoredRecordRow>& rows,
                               bool require_scores = true) {
  std::vector<LabeledExample> examples;
  examples.reserve(rows.size());
  std::map<std::string_view, std::size_t> seen;  // id -> line
  for (const auto& row : rows) {
    const auto [it, inserted] = seen.emplace(row.id, row.line);
    if (!inserted) {
      throw ParseError("duplicate id '" + row.id + "' (first at line " +
                           std::to_string(it->second) + ")",
                       row.line);
    }
    if (row.score) {
      if (!(*row.score >= 0.0 && *row.score <= 1.0)) {
        throw ParseError("score out of range [0,1]: " +
                             detail::format_double(*row.score),
                         row.line);
      }
    } else if (require_scores) {
      throw ParseError("missing score for id '" + row.id + "'", row.line);
    }
    LabeledExample ex;
    ex.id = row.id;
    ex.score = row.score.value_or(0.0);
    ex.label = row.label == 1 ? Label::positive : Label::negative;
    ex.subgroups = row.subgroups;
    ex.text = row.text;
    examples.push_back(std::move(ex));
  }
  return Dataset(std::move(examples));
}

inline Dataset load_dataset(const std::string& path, DataFormat format) {
  return rows_to_dataset(read_rows(path, format), /*require_scores=*/true);
}

inline void write_rows(const std::vector<ScoredRecordRow>& rows,
                       const std::string& path, DataFormat format) {
  std::string out;
  if (format == DataFormat::csv) {
    out += detail::kDatasetHeader;
    out += '\n';
    for (const auto& row : rows) {
      out += detail::csv_escape(row.id);
      out += ',';
      if (row.score) out += detail::format_double(*row.score);
      out += ',';
      out += row.label == 1 ? '1' : '0';
      out += ',';
      std::string tags;
      for (const auto& tag : row.subgroups) {
        if (!tags.empty()) tags.push_back('|');
        tags += tag;
      }
      out += detail::csv_escape(tags);
      out += ',';
      out += detail::csv_escape(row.text);
      out += '\n';
    }
  } else {
    for (const auto& row : rows) {
      json object;
      object["id"] = row.id;
      if (row.score) {
        object["score"] = *row.score;
      } else {
        object["score"] = nullptr;
      }
      object["label"] = row.label;
      object["subgroups"] = row.subgroups;
      object["text"] = row.text;
      out += object.dump();
      out += '\n';
    }
  }
  detail::write_file(path, out);
}

inline std::vector<ScoredRecordRow> dataset_to_rows(const Dataset& dataset) {
  std::vector<ScoredRecordRow> rows;
  rows.reserve(dataset.size());
  for (const auto& ex : dataset.examples()) {
    ScoredRecordRow row;
    row.id = ex.id;
    row.score = ex.score;
    row.label = is_positive(ex.label) ? 1 : 0;
    row.subgroups = ex.subgroups;
    row.text = ex.text;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_dataset(const Dataset& dataset, const std::string& path,
                          DataFormat format) {
  write_rows(dataset_to_rows(dataset), path, format);
}

// Reorder `scored` to match `reference` example order, verifying ids,
// labels and tags agree; used when model scores come from a file.
inline Dataset align_by_id(const Dataset& reference, const Dataset& scored) {
  if (reference.size() != scored.size()) {
    throw std::invalid_argument(
        "scored dataset size does not match the base dataset");
  }
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    index.emplace(scored.examples()[i].id, i);
  }
  std::vector<LabeledExample> aligned;
  aligned.reserve(reference.size());
  for (const auto& ref : reference.examples()) {
    const auto it = index.find(ref.id);
    if (it == index.end()) {
      throw std::invalid_argument("scored dataset is missing id '" + ref.id +
                                  "'");
    }
    const auto& ex = scored.examples()[it->second];
    if (ex.label != ref.label || ex.subgroups != ref.subgroups) {
      throw std::invalid_argument("scored dataset disagrees with base on '" +
                                  ref.id + "'");
    }
    aligned.push_back(ex);
  }
  return Dataset(std::move(aligned));
}

// --- report writers ---

namespace detail {

inline void append_metric_cells(std::string& out, const Metric& metric) {
  // value column, then reason column
  if (metric.has_value()) {
    out += format_metric(metric.value());
    out += ',';
  } else {
    out += ',';
    out += to_string(metric.reason());
  }
}

inline json metric_json(const Metric& metric) {
  json cell;
  if (metric.has_value()) {
    cell["value"] = metric.value();
  } else {
    cell["value"] = nullptr;
    cell["reason"] = std::string(to_string(metric.reason()));
  }
  return cell;
}

}  // namespace detail

inline void write_report(const std::vector<BiasMetrics>& report,
                         const std::string& path, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out =
        "subgroup,metric,value,reason,subgroup_negatives,subgroup_positives,"
        "background_negatives,background_positives\n";
    for (const auto& row : report) {
      const std::pair<std::string_view, const Metric*> metrics[] = {
          {"subgroup_auc", &row.subgroup_auc},
          {"bpsn_auc", &row.bpsn_auc},
          {"bnsp_auc", &row.bnsp_auc},
          {"pinned_auc", &row.pinned_auc},
      };
      for (const auto& [name, metric] : metrics) {
        out += detail::csv_escape(row.subgroup);
        out += ',';
        out += name;
        out += ',';
        detail::append_metric_cells(out, *metric);
        out += ',';
        out += std::to_string(row.counts.subgroup_negatives);
        out += ',';
        out += std::to_string(row.counts.subgroup_positives);
        out += ',';
        out += std::to_string(row.counts.background_negatives);
        out += ',';
        out += std::to_string(row.counts.background_positives);
        out += '\n';
      }
    }
    detail::write_file(path, out);
    return;
  }
  json doc = json::array();
  for (const auto& row : report) {
    json entry;
    entry["subgroup"] = row.subgroup;
    entry["counts"] = {{"subgroup_negatives", row.counts.subgroup_negatives},
                       {"subgroup_positives", row.counts.subgroup_positives},
                       {"background_negatives", row.counts.background_negatives},
                       {"background_positives", row.counts.background_positives}};
    entry["subgroup_auc"] = detail::metric_json(row.subgroup_auc);
    entry["bpsn_auc"] = detail::metric_json(row.bpsn_auc);
    entry["bnsp_auc"] = detail::metric_json(row.bnsp_auc);
    entry["pinned_auc"] = detail::metric_json(row.pinned_auc);
    doc.push_back(std::move(entry));
  }
  detail::write_file(path, doc.dump(2) + "\n");
}

inline void write_report(const DecompositionReport& report,
                         const std::string& path, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out = "pair,pair_count,weight,mwu,auc\n";
    for (const auto& term : report.terms) {
      out += pair_label(term.kind);
      out += ',';
      out += std::to_string(term.pair_count);
      out += ',';
      out += detail::format_metric(term.weight);
      out += ',';
      out += detail::format_double(term.mwu());
      out += ',';
      if (term.auc) out += detail::format_metric(*term.auc);
      out += '\n';
    }
    std::int64_t mwu_half_total = 0;
    for (const auto& term : report.terms) mwu_half_total += term.mwu_half;
    out += "total,";
    out += std::to_string(report.total_pair_count);
    out += ",1.000000,";
    out += detail::format_double(static_cast<double>(mwu_half_total) / 2.0);
    out += ',';
    out += detail::format_metric(report.reconstructed_pinned_auc);
    out += '\n';
    detail::write_file(path, out);
    return;
  }
  json doc;
  json terms = json::array();
  for (const auto& term : report.terms) {
    json entry;
    entry["pair"] = std::string(pair_label(term.kind));
    entry["pair_count"] = term.pair_count;
    entry["weight"] = term.weight;
    entry["mwu"] = term.mwu();
    if (term.auc) {
      entry["auc"] = *term.auc;
    } else {
      entry["auc"] = nullptr;
      entry["reason"] = "empty-pair-set";
    }
    terms.push_back(std::move(entry));
  }
  doc["terms"] = std::move(terms);
  doc["total_pair_count"] = report.total_pair_count;
  doc["reconstructed_pinned_auc"] = report.reconstructed_pinned_auc;
  detail::write_file(path, doc.dump(2) + "\n");
}

inline void write_report(const TrialSummary& summary, const std::string& path,
                         ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out =
        "subgroup,model,metric,baseline,baseline_reason,mean,stddev,stderr,"
        "present_trials,absent_trials,absent_reason\n";
    for (const auto& cell : summary.cells) {
      out += detail::csv_escape(cell.subgroup);
      out += ',';
      out += detail::csv_escape(cell.model);
      out += ',';
      out += to_string(cell.metric);
      out += ',';
      detail::append_metric_cells(out, cell.agg.baseline);
      out += ',';
      if (cell.agg.mean) out += detail::format_metric(*cell.agg.mean);
      out += ',';
      if (cell.agg.stddev) out += detail::format_metric(*cell.agg.stddev);
      out += ',';
      if (const auto se = cell.agg.stderr_of_mean()) {
        out += detail::format_metric(*se);
      }
      out += ',';
      out += std::to_string(cell.agg.present_trials);
      out += ',';
      out += std::to_string(cell.agg.absent_trials);
      out += ',';
      if (cell.agg.absent_reason) out += to_string(*cell.agg.absent_reason);
      out += '\n';
    }
    detail::write_file(path, out);
    return;
  }
  json doc;
  doc["trials"] = summary.trials;
  doc["master_seed"] = summary.master_seed;
  if (summary.skew) {
    doc["skew"] = {{"term", summary.skew->term},
                   {"target_label",
                    is_positive(summary.skew->target_label) ? "positive"
                                                            : "negative"},
                   {"removal_fraction", summary.skew->removal_fraction}};
  } else {
    doc["skew"] = nullptr;
  }
  doc["models"] = summary.models;
  doc["subgroups"] = summary.subgroups;
  json cells = json::array();
  for (const auto& cell : summary.cells) {
    json entry;
    entry["subgroup"] = cell.subgroup;
    entry["model"] = cell.model;
    entry["metric"] = std::string(to_string(cell.metric));
    entry["baseline"] = detail::metric_json(cell.agg.baseline);
    entry["mean"] = cell.agg.mean ? json(*cell.agg.mean) : json(nullptr);
    entry["stddev"] = cell.agg.stddev ? json(*cell.agg.stddev) : json(nullptr);
    const auto se = cell.agg.stderr_of_mean();
    entry["stderr"] = se ? json(*se) : json(nullptr);
    entry["present_trials"] = cell.agg.present_trials;
    entry["absent_trials"] = cell.agg.absent_trials;
    if (cell.agg.absent_reason) {
      entry["absent_reason"] = std::string(to_string(*cell.agg.absent_reason));
    }
    cells.push_back(std::move(entry));
  }
  doc["cells"] = std::move(cells);
  detail::write_file(path, doc.dump(2) + "\n");
}

inline void write_report(const ComparisonTable& table, const std::string& path,
                         ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::string out =
        "subgroup,metric,model_a,model_b,improved,reason_a,reason_b,"
        "skewed_a,skewed_b,selected\n";
    for (const auto& row : table.rows) {
      out += detail::csv_escape(row.subgroup);
      out += ',';
      out += to_string(row.metric);
      out += ',';
      if (row.original_a.has_value()) {
        out += detail::format_metric(row.original_a.value());
      }
      out += ',';
      if (row.original_b.has_value()) {
        out += detail::format_metric(row.original_b.value());
      }
      out += ',';
      out += row.improved ? "true" : "false";
      out += ',';
      if (!row.original_a.has_value()) out += to_string(row.original_a.reason());
      out += ',';
      if (!row.original_b.has_value()) out += to_string(row.original_b.reason());
      out += ',';
      if (row.skewed_a) out += detail::format_metric(*row.skewed_a);
      out += ',';
      if (row.skewed_b) out += detail::format_metric(*row.skewed_b);
      out += ',';
      out += row.selected ? "true" : "false";
      out += '\n';
    }
    detail::write_file(path, out);
    return;
  }
  json doc;
  doc["model_a"] = table.model_a;
  doc["model_b"] = table.model_b;
  doc["selection_threshold"] = table.selection_threshold
                                   ? json(*table.selection_threshold)
                                   : json(nullptr);
  json rows = json::array();
  for (const auto& row : table.rows) {
    json entry;
    entry["subgroup"] = row.subgroup;
    entry["metric"] = std::string(to_string(row.metric));
    entry["model_a"] = detail::metric_json(row.original_a);
    entry["model_b"] = detail::metric_json(row.original_b);
    entry["improved"] = row.improved;
    entry["skewed_a"] = row.skewed_a ? json(*row.skewed_a) : json(nullptr);
    entry["skewed_b"] = row.skewed_b ? json(*row.skewed_b) : json(nullptr);
    entry["selected"] = row.selected;
    rows.push_back(std::move(entry));
  }
  doc["rows"] = std::move(rows);
  detail::write_file(path, doc.dump(2) + "\n");
}

}  // namespace pauc::io
