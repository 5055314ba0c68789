// docmine: mine parallel document pairs from two monolingual corpora.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "docmine/embed_client.hpp"
#include "docmine/error.hpp"
#include "docmine/kernels.hpp"
#include "docmine/pipeline.hpp"
#include "docmine/text_io.hpp"

namespace {

using namespace docmine;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void add_run_options(CLI::App& cmd, RunConfig& cfg, std::string& granularity,
                     std::string& method, std::string& format) {
  cmd.add_option("--src-manifest", cfg.src_manifest, "Source-side manifest (JSON lines)")->required();
  cmd.add_option("--tgt-manifest", cfg.tgt_manifest, "Target-side manifest (JSON lines)")->required();
  cmd.add_option("--src-embeddings", cfg.src_embeddings, "Source unit embeddings (.demb)");
  cmd.add_option("--tgt-embeddings", cfg.tgt_embeddings, "Target unit embeddings (.demb)");
  cmd.add_option("--src-noise-manifest", cfg.src_noise_manifest, "Source noise pool to inject");
  cmd.add_option("--tgt-noise-manifest", cfg.tgt_noise_manifest, "Target noise pool to inject");
  cmd.add_option("--gold", cfg.gold, "Gold pairs TSV (src_doc, tgt_doc)");
  cmd.add_option("--out-dir", cfg.out_dir, "Output directory")->required();
  cmd.add_option("-g,--granularity", granularity, "Sentences per chunk (dac mode)")
      ->capture_default_str();
  cmd.add_option("--method", method, "Pooling method: MP, LP, IDF, LIDF (pooled mode)")
      ->capture_default_str();
  cmd.add_option("-k,--k", cfg.k, "Nearest neighbours per unit")->capture_default_str();
  cmd.add_option("--threshold", cfg.threshold, "DAC threshold")->capture_default_str();
  cmd.add_option("--margin-floor", cfg.margin_floor, "Drop mined pairs below this margin");
  cmd.add_flag("--keep-all", cfg.keep_all,
               "Keep every document pair above threshold (no one-to-one matching)");
  cmd.add_option("--noise-ratio", cfg.noise_ratio, "Noise documents per alignable document")
      ->capture_default_str();
  cmd.add_option("--seed", cfg.seed, "Seed for noise sampling")->capture_default_str();
  cmd.add_option("-j,--workers", cfg.workers, "Worker threads")->capture_default_str();
  cmd.add_option("--endpoint", cfg.endpoint,
                 std::string("Embedding service URL (overridden by ") + kEndpointEnvVar + ")");
  cmd.add_option("--batch-size", cfg.batch_size, "Texts per embedding request")
      ->capture_default_str();
  cmd.add_option("--report-format", format, "tsv or json")->capture_default_str();
}

void finish_run_options(RunConfig& cfg, const std::string& granularity, const std::string& method,
                        const std::string& format) {
  cfg.granularity = Granularity::parse(granularity);
  cfg.method = parse_pooling_method(method);
  cfg.report_format = parse_report_format(format);
}

void print_report(const EvalReport& r) {
  std::printf("tp=%zu predicted=%zu gold=%zu precision=%.6f recall=%.6f f1=%.6f\n",
              r.true_positives, r.predicted_count, r.gold_count, r.precision, r.recall, r.f1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine parallel document pairs by chunk-level margin alignment"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel variant: auto, scalar, avx2, neon")->capture_default_str();

  // segment
  auto* seg = app.add_subcommand("segment", "Split documents into G-sentence units (TSV)");
  std::filesystem::path seg_manifest, seg_out;
  std::string seg_g = "1";
  seg->add_option("--manifest", seg_manifest)->required();
  seg->add_option("-g,--granularity", seg_g)->capture_default_str();
  seg->add_option("-o,--out", seg_out)->required();

  // import-embeddings
  auto* imp = app.add_subcommand("import-embeddings", "Convert text vectors to a .demb matrix");
  std::filesystem::path imp_vectors, imp_out;
  std::optional<std::filesystem::path> imp_units;
  imp->add_option("--vectors", imp_vectors, "Lines of id<TAB>v1 v2 ...")->required();
  imp->add_option("--units", imp_units, "Units TSV fixing row order and coverage");
  imp->add_option("-o,--out", imp_out)->required();

  // fetch-embeddings
  auto* fetch = app.add_subcommand("fetch-embeddings", "Embed a units TSV via an HTTP service");
  std::filesystem::path fetch_units, fetch_out;
  std::optional<std::string> fetch_endpoint;
  EmbedClientOptions fetch_opts;
  fetch->add_option("--units", fetch_units)->required();
  fetch->add_option("--endpoint", fetch_endpoint);
  fetch->add_option("--batch-size", fetch_opts.batch_size)->capture_default_str();
  fetch->add_option("-j,--workers", fetch_opts.concurrency, "Concurrent requests")
      ->capture_default_str();
  fetch->add_option("-o,--out", fetch_out)->required();

  // pool
  auto* pool = app.add_subcommand("pool", "Pool sentence embeddings into document embeddings");
  std::filesystem::path pool_manifest, pool_emb, pool_out;
  std::string pool_method = "MP";
  std::size_t pool_workers = 1;
  pool->add_option("--manifest", pool_manifest)->required();
  pool->add_option("--embeddings", pool_emb, "Sentence-level (G=1) embeddings")->required();
  pool->add_option("--method", pool_method)->capture_default_str();
  pool->add_option("-j,--workers", pool_workers)->capture_default_str();
  pool->add_option("-o,--out", pool_out)->required();

  // align
  auto* align = app.add_subcommand("align", "Align documents (DAC or pooled baseline)");
  RunConfig align_cfg;
  std::string align_mode = "dac", align_g = "1", align_method = "MP", align_format = "tsv";
  align->add_option("--mode", align_mode, "dac or pooled")->capture_default_str();
  add_run_options(*align, align_cfg, align_g, align_method, align_format);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a pairs TSV against gold");
  std::filesystem::path eval_pairs, eval_gold;
  std::optional<std::filesystem::path> eval_out;
  std::string eval_format = "tsv";
  eval->add_option("--pairs", eval_pairs)->required();
  eval->add_option("--gold", eval_gold)->required();
  eval->add_option("--report-format", eval_format)->capture_default_str();
  eval->add_option("-o,--out", eval_out);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Evaluate DAC over a list of thresholds");
  RunConfig sweep_cfg;
  std::string sweep_g = "1", sweep_method = "MP", sweep_format = "tsv";
  sweep->add_option("--thresholds", sweep_cfg.thresholds,
                    "Ascending thresholds (default 0.0,0.1,...,1.0)")
      ->delimiter(',');
  add_run_options(*sweep, sweep_cfg, sweep_g, sweep_method, sweep_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (isa != "auto") set_active_isa(parse_isa(isa));

    if (*seg) {
      run_segment(seg_manifest, Granularity::parse(seg_g), seg_out);
    } else if (*imp) {
      write_matrix(import_text_vectors(imp_vectors, imp_units), imp_out);
    } else if (*fetch) {
      const auto endpoint = resolve_endpoint(fetch_endpoint);
      if (!endpoint) {
        throw Error(Errc::invalid_argument, "cli", "no endpoint (use --endpoint or " +
                    std::string(kEndpointEnvVar) + ")", ErrorKind::validation);
      }
      parse_endpoint(*endpoint);
      const auto units = read_units_tsv(fetch_units);
      std::vector<std::string> ids, texts;
      for (const auto& u : units) {
        ids.push_back(u.unit_id);
        texts.push_back(u.text);
      }
      write_matrix(fetch_embeddings(ids, texts, *endpoint, fetch_opts), fetch_out);
    } else if (*pool) {
      run_pool(pool_manifest, pool_emb, parse_pooling_method(pool_method), pool_out, pool_workers);
    } else if (*align) {
      align_cfg.mode = parse_align_mode(align_mode);
      finish_run_options(align_cfg, align_g, align_method, align_format);
      const auto outcome = run_align(align_cfg);
      std::printf("pairs=%zu\n", outcome.predicted.size());
      if (outcome.report) print_report(*outcome.report);
    } else if (*eval) {
      const auto format = parse_report_format(eval_format);
      auto report = run_evaluate(eval_pairs, eval_gold);
      const EvalReport reports[] = {report};
      if (eval_out) {
        write_text_file(*eval_out, format_reports(reports, format));
      } else {
        std::cout << format_reports(reports, format);
      }
    } else if (*sweep) {
      sweep_cfg.mode = AlignMode::dac;
      finish_run_options(sweep_cfg, sweep_g, sweep_method, sweep_format);
      if (sweep_cfg.thresholds.empty()) {
        for (int i = 0; i <= 10; ++i) sweep_cfg.thresholds.push_back(i / 10.0);
      }
      for (const auto& r : run_sweep(sweep_cfg)) {
        std::printf("threshold=%.6f ", r.threshold.value_or(0.0));
        print_report(r);
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: module=%s code=%s: %s\n", e.module().c_str(),
                 std::string(to_string(e.code())).c_str(), e.what());
    return e.kind() == ErrorKind::validation ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
