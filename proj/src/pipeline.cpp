#include "docmine/pipeline.hpp"

#include <array>
#include <charconv>
#include <unordered_map>

#include <json.hpp>

#include "docmine/dac.hpp"
#include "docmine/embed_client.hpp"
#include "docmine/error.hpp"
#include "docmine/pooled_align.hpp"
#include "docmine/text_io.hpp"

namespace docmine {
namespace fs = std::filesystem;
namespace {

constexpr const char* kModule = "cli";

[[noreturn]] void invalid(const std::string& message) {
  throw Error(Errc::invalid_argument, kModule, message, ErrorKind::validation);
}

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) invalid(std::string(what) + " path is required");
  if (!fs::is_regular_file(path)) {
    throw Error(Errc::missing_file, kModule,
                std::string(what) + " not found: " + path.string(), ErrorKind::validation);
  }
}

std::string path_or_null(const std::optional<fs::path>& p) {
  return p ? p->string() : std::string();
}

struct Side {
  std::vector<Document> docs;
  EmbeddingMatrix units;
};

std::vector<Document> load_side(const fs::path& manifest, const std::optional<fs::path>& noise,
                                double ratio, std::uint64_t seed) {
  auto docs = load_corpus(manifest);
  if (!noise) return docs;
  return inject_noise(docs, load_corpus(*noise), NoiseConfig{ratio, seed});
}

EmbeddingMatrix load_units(const std::optional<fs::path>& path, const std::vector<Document>& docs,
                           const Granularity& g, const RunConfig& config) {
  if (path) {
    auto m = read_matrix(*path);
    check_finite(m);
    return normalize(m);
  }
  const auto endpoint = resolve_endpoint(config.endpoint);
  EmbedClientOptions options;
  options.batch_size = config.batch_size;
  options.concurrency = config.workers;
  return fetch_embeddings(segment_corpus(docs, g), *endpoint, options);
}

std::array<std::uint64_t, 2> side_seeds(std::uint64_t seed) {
  SplitMix64 root(seed);
  const auto src = root.next();
  const auto tgt = root.next();
  return {src, tgt};
}

struct Prepared {
  Side src;
  Side tgt;
  std::optional<GoldSet> gold;
};

Prepared prepare(const RunConfig& config) {
  const auto seeds = side_seeds(config.seed);
  Prepared p;
  p.src.docs = load_side(config.src_manifest, config.src_noise_manifest, config.noise_ratio, seeds[0]);
  p.tgt.docs = load_side(config.tgt_manifest, config.tgt_noise_manifest, config.noise_ratio, seeds[1]);
  if (config.gold) p.gold = load_gold(*config.gold);
  const Granularity g = config.mode == AlignMode::dac ? config.granularity : Granularity(1);
  p.src.units = load_units(config.src_embeddings, p.src.docs, g, config);
  p.tgt.units = load_units(config.tgt_embeddings, p.tgt.docs, g, config);
  return p;
}

DacConfig dac_config(const RunConfig& config) {
  DacConfig dc;
  dc.threshold = config.threshold;
  dc.granularity = config.granularity;
  dc.margin.k = config.k;
  dc.margin.workers = config.workers;
  dc.margin_floor = config.margin_floor;
  dc.one_to_one = !config.keep_all;
  return dc;
}

const char* report_extension(ReportFormat f) { return f == ReportFormat::json ? ".json" : ".tsv"; }

}  // namespace

AlignMode parse_align_mode(std::string_view name) {
  if (name == "dac") return AlignMode::dac;
  if (name == "pooled") return AlignMode::pooled;
  invalid("unknown align mode '" + std::string(name) + "' (expected dac or pooled)");
}

std::string_view to_string(AlignMode mode) noexcept {
  return mode == AlignMode::dac ? "dac" : "pooled";
}

void validate(const RunConfig& config, bool sweep) {
  require_file(config.src_manifest, "source manifest");
  require_file(config.tgt_manifest, "target manifest");
  if (config.src_noise_manifest) require_file(*config.src_noise_manifest, "source noise manifest");
  if (config.tgt_noise_manifest) require_file(*config.tgt_noise_manifest, "target noise manifest");
  if (config.gold) require_file(*config.gold, "gold file");
  const bool need_endpoint = !config.src_embeddings || !config.tgt_embeddings;
  if (config.src_embeddings) require_file(*config.src_embeddings, "source embeddings");
  if (config.tgt_embeddings) require_file(*config.tgt_embeddings, "target embeddings");
  if (need_endpoint) {
    const auto endpoint = resolve_endpoint(config.endpoint);
    if (!endpoint) {
      invalid("embeddings missing for a side and no endpoint configured (flag or " +
              std::string(kEndpointEnvVar) + ")");
    }
    parse_endpoint(*endpoint);
  }
  if (config.out_dir.empty()) invalid("output directory is required");
  if (fs::exists(config.out_dir) && !fs::is_directory(config.out_dir)) {
    invalid("output path exists and is not a directory: " + config.out_dir.string());
  }
  if (config.k == 0) invalid("k must be >= 1");
  if (config.workers == 0) invalid("workers must be >= 1");
  if (config.batch_size == 0) invalid("batch size must be >= 1");
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) invalid("threshold must lie in [0, 1]");
  if (!(config.noise_ratio >= 0.0)) invalid("noise ratio must be >= 0");
  if (config.mode == AlignMode::dac && config.granularity.is_whole_document()) {
    invalid("dac mode needs an integer granularity; use --mode pooled for whole documents");
  }
  if (sweep) {
    if (config.mode != AlignMode::dac) invalid("sweep runs in dac mode only");
    if (!config.gold) invalid("sweep needs a gold file");
    for (std::size_t i = 0; i < config.thresholds.size(); ++i) {
      const double t = config.thresholds[i];
      if (!(t >= 0.0 && t <= 1.0)) invalid("sweep thresholds must lie in [0, 1]");
      if (i > 0 && t < config.thresholds[i - 1]) invalid("sweep thresholds must be sorted ascending");
    }
  }
}

std::string config_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(config.mode);
  j["src_manifest"] = config.src_manifest.string();
  j["tgt_manifest"] = config.tgt_manifest.string();
  j["src_embeddings"] = path_or_null(config.src_embeddings);
  j["tgt_embeddings"] = path_or_null(config.tgt_embeddings);
  j["src_noise_manifest"] = path_or_null(config.src_noise_manifest);
  j["tgt_noise_manifest"] = path_or_null(config.tgt_noise_manifest);
  j["gold"] = path_or_null(config.gold);
  j["out_dir"] = config.out_dir.string();
  j["granularity"] = config.granularity.to_string();
  j["method"] = to_string(config.method);
  j["k"] = config.k;
  j["threshold"] = config.threshold;
  j["margin_floor"] = config.margin_floor ? nlohmann::ordered_json(*config.margin_floor) : nullptr;
  j["keep_all"] = config.keep_all;
  j["noise_ratio"] = config.noise_ratio;
  j["seed"] = config.seed;
  j["workers"] = config.workers;
  j["endpoint"] = config.endpoint.value_or("");
  j["batch_size"] = config.batch_size;
  j["report_format"] = config.report_format == ReportFormat::json ? "json" : "tsv";
  if (!config.thresholds.empty()) j["thresholds"] = config.thresholds;
  return j.dump(2) + "\n";
}

AlignOutcome run_align(const RunConfig& config) {
  validate(config);
  const auto prepared = prepare(config);

  AlignOutcome outcome;
  std::string pairs_tsv;
  if (config.mode == AlignMode::dac) {
    const auto run = align_documents_dac(prepared.src.docs, prepared.tgt.docs, prepared.src.units,
                                         prepared.tgt.units, dac_config(config));
    pairs_tsv = format_doc_pairs_tsv(run.selected);
    outcome.predicted = doc_pairs(run.selected);
  } else {
    std::optional<IdfTable> src_idf;
    std::optional<IdfTable> tgt_idf;
    if (needs_idf(config.method)) {
      src_idf = build_idf(prepared.src.docs);
      tgt_idf = build_idf(prepared.tgt.docs);
    }
    PooledConfig pc;
    pc.method = config.method;
    pc.margin.k = config.k;
    pc.margin.workers = config.workers;
    pc.margin_floor = config.margin_floor;
    const auto run = align_documents_pooled(prepared.src.docs, prepared.tgt.docs,
                                            prepared.src.units, prepared.tgt.units, pc,
                                            src_idf ? &*src_idf : nullptr,
                                            tgt_idf ? &*tgt_idf : nullptr);
    pairs_tsv = format_pairs_tsv(run.pairs);
    outcome.predicted = doc_pairs(run.pairs);
  }
  if (prepared.gold) {
    outcome.report = score(outcome.predicted, *prepared.gold);
    if (config.mode == AlignMode::dac) outcome.report->threshold = config.threshold;
  }

  fs::create_directories(config.out_dir);
  write_text_file(config.out_dir / "pairs.tsv", pairs_tsv);
  write_text_file(config.out_dir / "config.json", config_json(config));
  if (outcome.report) {
    const EvalReport reports[] = {*outcome.report};
    write_text_file(config.out_dir / (std::string("report") + report_extension(config.report_format)),
                    format_reports(reports, config.report_format));
  }
  return outcome;
}

std::vector<EvalReport> run_sweep(const RunConfig& config) {
  validate(config, /*sweep=*/true);
  const auto prepared = prepare(config);
  const auto dc = dac_config(config);
  const auto run = align_documents_dac(prepared.src.docs, prepared.tgt.docs, prepared.src.units,
                                       prepared.tgt.units, dc);
  auto reports = sweep_thresholds(run.scores, *prepared.gold, config.thresholds, dc, config.workers);

  fs::create_directories(config.out_dir);
  write_text_file(config.out_dir / "config.json", config_json(config));
  write_text_file(config.out_dir / (std::string("sweep") + report_extension(config.report_format)),
                  format_reports(reports, config.report_format));
  return reports;
}

std::string format_units_tsv(const std::vector<ChunkUnit>& units) {
  std::string out;
  for (const auto& u : units) {
    out += escape_tsv(u.unit_id);
    out += '\t';
    out += escape_tsv(u.text);
    out += '\n';
  }
  return out;
}

void run_segment(const fs::path& manifest, const Granularity& g, const fs::path& out) {
  if (g.is_whole_document()) invalid("segment needs an integer granularity");
  require_file(manifest, "manifest");
  if (out.empty()) invalid("output path is required");
  const auto docs = load_corpus(manifest);
  write_text_file(out, format_units_tsv(segment_corpus(docs, g)));
}

std::vector<UnitText> read_units_tsv(const fs::path& path) {
  std::vector<UnitText> units;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(Errc::malformed_input, kModule,
                  path.string() + ":" + std::to_string(i + 1) + ": expected unit_id<TAB>text",
                  ErrorKind::validation);
    }
    units.push_back({unescape_tsv(std::string_view(lines[i]).substr(0, tab)),
                     unescape_tsv(std::string_view(lines[i]).substr(tab + 1))});
  }
  return units;
}

EmbeddingMatrix import_text_vectors(const fs::path& vectors, const std::optional<fs::path>& units) {
  std::vector<std::string> ids;
  std::vector<float> data;
  std::size_t dim = 0;
  const auto lines = read_lines(vectors);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = vectors.string() + ":" + std::to_string(i + 1);
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(Errc::malformed_input, kModule, where + ": expected id<TAB>components",
                  ErrorKind::validation);
    }
    ids.push_back(unescape_tsv(std::string_view(lines[i]).substr(0, tab)));
    std::size_t count = 0;
    for (auto token : split_tokens(std::string_view(lines[i]).substr(tab + 1))) {
      float value = 0.0f;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw Error(Errc::malformed_input, kModule,
                    where + ": bad component '" + std::string(token) + "'", ErrorKind::validation);
      }
      data.push_back(value);
      ++count;
    }
    if (dim == 0) dim = count;
    if (count == 0 || count != dim) {
      throw Error(Errc::dimension_mismatch, kModule,
                  where + ": row has " + std::to_string(count) + " components, expected " +
                      std::to_string(dim),
                  ErrorKind::validation);
    }
  }
  if (ids.empty()) throw Error(Errc::empty_input, kModule, vectors.string() + " holds no vectors");
  EmbeddingMatrix m(dim, std::move(ids), std::move(data));
  check_finite(m);
  if (units) {
    std::vector<std::string> order;
    for (auto& u : read_units_tsv(*units)) order.push_back(std::move(u.unit_id));
    m = m.select(order);
  }
  return normalize(m);
}

void run_pool(const fs::path& manifest, const fs::path& embeddings, PoolingMethod method,
              const fs::path& out, std::size_t workers) {
  require_file(manifest, "manifest");
  require_file(embeddings, "embeddings");
  if (out.empty()) invalid("output path is required");
  const auto docs = load_corpus(manifest);
  auto units = read_matrix(embeddings);
  check_finite(units);
  units = normalize(units);
  std::optional<IdfTable> idf;
  if (needs_idf(method)) idf = build_idf(docs);
  write_matrix(pool_corpus(docs, units, method, idf ? &*idf : nullptr, workers), out);
}

EvalReport run_evaluate(const fs::path& pairs, const fs::path& gold) {
  require_file(pairs, "pairs file");
  require_file(gold, "gold file");
  const auto gold_set = load_gold(gold);
  return score(read_doc_pairs(pairs), gold_set);
}

}  // namespace docmine
