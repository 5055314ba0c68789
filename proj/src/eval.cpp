#include "docmine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "docmine/error.hpp"
#include "docmine/parallel.hpp"
#include "docmine/text_io.hpp"

namespace docmine {
namespace {

constexpr const char* kModule = "eval";

__extension__ using u128 = unsigned __int128;

}  // namespace

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  u128 m = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t floor = (0 - bound) % bound;
    while (low < floor) {
      m = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::size_t noise_count(std::size_t alignable, double ratio) {
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) {
    throw Error(Errc::invalid_argument, kModule, "noise ratio must be a finite value >= 0",
                ErrorKind::validation);
  }
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(alignable)));
}

std::vector<Document> inject_noise(const std::vector<Document>& alignable,
                                   const std::vector<Document>& noise_pool,
                                   const NoiseConfig& config) {
  const std::size_t count = noise_count(alignable.size(), config.ratio);
  if (count > noise_pool.size()) {
    throw Error(Errc::insufficient_noise, kModule,
                "need " + std::to_string(count) + " noise documents, pool has " +
                    std::to_string(noise_pool.size()),
                ErrorKind::validation);
  }
  std::unordered_set<std::string_view> ids;
  for (const auto& d : alignable) ids.insert(d.doc_id);
  for (const auto& d : noise_pool) {
    if (ids.contains(d.doc_id)) {
      throw Error(Errc::id_collision, kModule,
                  "noise doc_id '" + d.doc_id + "' also names an alignable document",
                  ErrorKind::validation);
    }
  }

  std::vector<std::size_t> order(noise_pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(config.seed);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());

  std::vector<Document> out = alignable;
  out.reserve(alignable.size() + count);
  for (auto i : order) out.push_back(noise_pool[i]);
  return out;
}

GoldSet::GoldSet(std::vector<DocPair> pairs) {
  std::unordered_set<std::string> src;
  std::unordered_set<std::string> tgt;
  for (auto& p : pairs) {
    if (!src.insert(p.first).second || !tgt.insert(p.second).second) {
      throw Error(Errc::duplicate_id, kModule,
                  "gold is not one-to-one at pair (" + p.first + ", " + p.second + ")",
                  ErrorKind::validation);
    }
    pairs_.insert(std::move(p));
  }
}

std::vector<DocPair> read_doc_pairs(const std::filesystem::path& path) {
  std::vector<DocPair> pairs;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    const auto fields = split_tabs(lines[i]);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw Error(Errc::malformed_input, kModule,
                  path.string() + ":" + std::to_string(i + 1) + ": expected src<TAB>tgt",
                  ErrorKind::validation);
    }
    pairs.emplace_back(unescape_tsv(fields[0]), unescape_tsv(fields[1]));
  }
  return pairs;
}

GoldSet load_gold(const std::filesystem::path& path) { return GoldSet(read_doc_pairs(path)); }

EvalReport score(std::span<const DocPair> predicted, const GoldSet& gold) {
  std::set<DocPair> seen;
  EvalReport report;
  for (const auto& p : predicted) {
    if (!seen.insert(p).second) {
      throw Error(Errc::duplicate_pair, kModule,
                  "pair (" + p.first + ", " + p.second + ") predicted twice");
    }
    if (gold.contains(p)) ++report.true_positives;
  }
  report.predicted_count = predicted.size();
  report.gold_count = gold.size();
  const auto tp = static_cast<double>(report.true_positives);
  if (report.predicted_count > 0) report.precision = tp / static_cast<double>(report.predicted_count);
  if (report.gold_count > 0) report.recall = tp / static_cast<double>(report.gold_count);
  if (report.precision + report.recall > 0.0) {
    report.f1 = 2.0 * report.precision * report.recall / (report.precision + report.recall);
  }
  return report;
}

std::vector<DocPair> doc_pairs(std::span<const DocPairScore> scores) {
  std::vector<DocPair> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.emplace_back(s.src_doc, s.tgt_doc);
  return out;
}

std::vector<DocPair> doc_pairs(std::span<const AlignedUnitPair> pairs) {
  std::vector<DocPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.emplace_back(p.src_id, p.tgt_id);
  return out;
}

std::vector<EvalReport> sweep_thresholds(std::span<const DocPairScore> scores,
                                         const GoldSet& gold,
                                         std::span<const double> thresholds,
                                         const DacConfig& base, std::size_t workers) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0)) {
      throw Error(Errc::invalid_argument, kModule, "thresholds must lie in [0, 1]",
                  ErrorKind::validation);
    }
    if (i > 0 && thresholds[i] < thresholds[i - 1]) {
      throw Error(Errc::invalid_argument, kModule, "thresholds must be sorted ascending",
                  ErrorKind::validation);
    }
  }
  std::vector<EvalReport> reports(thresholds.size());
  parallel_for(thresholds.size(), workers, [&](std::size_t i) {
    DacConfig config = base;
    config.threshold = thresholds[i];
    const auto selected = select_pairs(scores, config);
    reports[i] = score(doc_pairs(selected), gold);
    reports[i].threshold = thresholds[i];
  });
  return reports;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "tsv") return ReportFormat::tsv;
  if (name == "json") return ReportFormat::json;
  throw Error(Errc::invalid_argument, kModule, "unknown report format '" + std::string(name) + "'",
              ErrorKind::validation);
}

std::string format_reports(std::span<const EvalReport> reports, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::tsv) {
    out = "threshold\ttp\tpredicted\tgold\tprecision\trecall\tf1\n";
    for (const auto& r : reports) {
      out += r.threshold ? fixed6(*r.threshold) : std::string("-");
      out += '\t' + std::to_string(r.true_positives);
      out += '\t' + std::to_string(r.predicted_count);
      out += '\t' + std::to_string(r.gold_count);
      out += '\t' + fixed6(r.precision);
      out += '\t' + fixed6(r.recall);
      out += '\t' + fixed6(r.f1);
      out += '\n';
    }
    return out;
  }
  // Hand-rolled so every number keeps exactly six decimals.
  out = "[";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out += i == 0 ? "\n" : ",\n";
    out += "  {\"threshold\": " + (r.threshold ? fixed6(*r.threshold) : std::string("null"));
    out += ", \"tp\": " + std::to_string(r.true_positives);
    out += ", \"predicted\": " + std::to_string(r.predicted_count);
    out += ", \"gold\": " + std::to_string(r.gold_count);
    out += ", \"precision\": " + fixed6(r.precision);
    out += ", \"recall\": " + fixed6(r.recall);
    out += ", \"f1\": " + fixed6(r.f1) + "}";
  }
  out += reports.empty() ? "]\n" : "\n]\n";
  return out;
}

}  // namespace docmine
