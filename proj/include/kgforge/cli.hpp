// Command-line front end. Five subcommands (build, link, stats, embed,
// validate) over one RunConfig: settings come from an optional key=value
// config file, then flags (flags win), then the KGFORGE_CATALOG_URL and
// KGFORGE_CACHE_DIR environment variables for anything still unset.
// Machine-readable JSON lines go to stderr, a human summary goes to stdout.
// Exit codes: 0 success, 1 validation failure, 2 usage or configuration
// error, 3 I/O or catalog failure.
#pragma once

#include <cstdlib>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kgforge/config.hpp"
#include "kgforge/manifest.hpp"
#include "kgforge/pipeline.hpp"

namespace kgforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

inline constexpr const char* kEnvCatalogUrl = "KGFORGE_CATALOG_URL";
inline constexpr const char* kEnvCacheDir = "KGFORGE_CACHE_DIR";

namespace detail {

inline int level_rank(const std::string& level) {
  if (level == "debug") return 0;
  if (level == "info") return 1;
  if (level == "warn") return 2;
  if (level == "error") return 3;
  throw ConfigError("log-level: expected debug|info|warn|error, got \"" + level + "\"");
}

}  // namespace detail

// One JSON object per line on the diagnostic stream.
class JsonlLogger {
 public:
  JsonlLogger(std::ostream& sink, const std::string& level)
      : sink_(&sink), threshold_(detail::level_rank(level)) {}

  void log(const std::string& level, const std::string& event,
           nlohmann::json fields = nlohmann::json::object()) const {
    if (detail::level_rank(level) < threshold_) return;
    fields["ts"] = manifest::utc_timestamp();
    fields["level"] = level;
    fields["event"] = event;
    (*sink_) << fields.dump() << '\n';
  }

 private:
  std::ostream* sink_;
  int threshold_;
};

// Applies one config-file setting. Keys use the long-flag spelling.
inline void apply_setting(pipeline::RunConfig& cfg, const std::string& key,
                          const std::string& value) {
  using config::parse_bool;
  using config::parse_double;
  using config::parse_int;
  if (key == "input") {
    cfg.input_dir = value;
  } else if (key == "output") {
    cfg.output_dir = value;
  } else if (key == "base-namespace") {
    cfg.base_namespace = value;
  } else if (key == "dump-date") {
    cfg.dump_date = value;
  } else if (key == "log-level") {
    detail::level_rank(value);  // reject unknown levels early
    cfg.log_level = value;
  } else if (key == "catalog-url") {
    cfg.catalog_url = value;
  } else if (key == "catalog-fixture") {
    cfg.catalog_fixture = value;
  } else if (key == "cache-dir") {
    cfg.cache_dir = value;
  } else if (key == "min-sim") {
    cfg.min_sim = parse_double(key, value);
  } else if (key == "case-sensitive-names") {
    cfg.case_sensitive_names = parse_bool(key, value);
  } else if (key == "workers") {
    cfg.workers = static_cast<int>(parse_int(key, value));
    cfg.train.workers = static_cast<std::size_t>(cfg.workers);
  } else if (key == "conferences") {
    cfg.conferences.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::string_view trimmed = config::detail::trim(item);
      if (!trimmed.empty()) cfg.conferences.emplace_back(trimmed);
    }
  } else if (key == "technique") {
    auto t = embed::technique_from_name(value);
    if (!t) throw ConfigError("technique: unknown name \"" + value + "\"");
    cfg.technique = *t;
  } else if (key == "dim") {
    cfg.train.dim = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "epochs") {
    cfg.train.max_epochs = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "eval-interval") {
    cfg.train.eval_interval = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "learning-rate") {
    cfg.train.learning_rate = parse_double(key, value);
  } else if (key == "margin") {
    cfg.train.margin = parse_double(key, value);
  } else if (key == "negatives") {
    cfg.train.negatives = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "batch-size") {
    cfg.train.batch_size = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "seed") {
    cfg.train.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "patience") {
    cfg.train.patience = static_cast<int>(parse_int(key, value));
  } else if (key == "deterministic") {
    cfg.train.deterministic = parse_bool(key, value);
  } else {
    throw ConfigError("unknown setting: " + key);
  }
}

namespace detail {

// The config file must be loaded before flag parsing so flags override it;
// this finds --config in raw args without committing to full CLI parsing.
inline std::string find_config_flag(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return "";
}

inline void apply_environment(pipeline::RunConfig& cfg) {
  if (cfg.catalog_url.empty()) {
    if (const char* v = std::getenv(kEnvCatalogUrl)) cfg.catalog_url = v;
  }
  if (cfg.cache_dir.empty()) {
    if (const char* v = std::getenv(kEnvCacheDir)) cfg.cache_dir = v;
  }
}

}  // namespace detail

// Runs one CLI invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  pipeline::RunConfig cfg;
  std::string config_path;
  std::string technique_name = embed::technique_name(cfg.technique);
  std::vector<std::string> conference_flags;
  bool parallel = false;

  try {
    config_path = detail::find_config_flag(args);
    if (!config_path.empty()) {
      for (const config::Setting& s : config::parse_file(config_path)) {
        apply_setting(cfg, s.key, s.value);
      }
      technique_name = embed::technique_name(cfg.technique);
    }
  } catch (const IoError& e) {
    err << nlohmann::json{{"level", "error"}, {"event", "config"}, {"error", e.what()}}.dump()
        << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << nlohmann::json{{"level", "error"}, {"event", "config"}, {"error", e.what()}}.dump()
        << '\n';
    return kExitUsage;
  }

  CLI::App app{"kgforge: Papers-With-Code dumps to an RDF knowledge graph"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value settings file (flags override it)");
    sub->add_option("-i,--input", cfg.input_dir, "directory with the upstream dump files");
    sub->add_option("-o,--output", cfg.output_dir, "directory for run artifacts");
    sub->add_option("--base-namespace", cfg.base_namespace, "IRI base namespace");
    sub->add_option("--log-level", cfg.log_level, "debug|info|warn|error");
  };

  CLI::App* build = app.add_subcommand("build", "ingest the dump and write the graph");
  add_common(build);
  build->add_option("--dump-date", cfg.dump_date, "dump date stamped into void.ttl");

  CLI::App* link = app.add_subcommand("link", "link authors and entities to a catalog");
  add_common(link);
  link->add_option("--catalog-url", cfg.catalog_url, "SPARQL endpoint URL");
  link->add_option("--catalog-fixture", cfg.catalog_fixture, "offline catalog JSON file");
  link->add_option("--cache-dir", cfg.cache_dir, "catalog response cache directory");
  link->add_option("--min-sim", cfg.min_sim, "fuzzy name similarity threshold");
  link->add_flag("--case-sensitive-names", cfg.case_sensitive_names,
                 "exact-name matching keeps case");
  link->add_option("--workers", cfg.workers, "concurrent disambiguation workers");

  CLI::App* stats = app.add_subcommand("stats", "entity counts and metric histograms");
  add_common(stats);
  stats->add_option("--conference", conference_flags,
                    "conference to profile (repeatable)");

  CLI::App* embed_cmd = app.add_subcommand("embed", "train KG embeddings on the graph");
  add_common(embed_cmd);
  embed_cmd->add_option("--technique", technique_name, "transe|distmult|complex|rotate");
  embed_cmd->add_option("--dim", cfg.train.dim, "embedding dimension");
  embed_cmd->add_option("--epochs", cfg.train.max_epochs, "training epochs");
  embed_cmd->add_option("--eval-interval", cfg.train.eval_interval, "epochs per checkpoint");
  embed_cmd->add_option("--learning-rate", cfg.train.learning_rate, "SGD step size");
  embed_cmd->add_option("--margin", cfg.train.margin, "ranking margin");
  embed_cmd->add_option("--negatives", cfg.train.negatives, "negatives per positive");
  embed_cmd->add_option("--batch-size", cfg.train.batch_size, "triples per batch");
  embed_cmd->add_option("--seed", cfg.train.seed, "RNG seed");
  embed_cmd->add_option("--patience", cfg.train.patience,
                        "checkpoints allowed to worsen before stopping");
  embed_cmd->add_flag("--parallel", parallel,
                      "unsynchronized parallel updates (not reproducible)");
  embed_cmd->add_option("--workers", cfg.train.workers, "parallel training workers");

  CLI::App* validate = app.add_subcommand("validate", "check the dump against the schema");
  add_common(validate);

  std::vector<const char*> argv;
  argv.push_back("kgforge");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream buffer;
    const int code = app.exit(e, buffer, buffer);
    (code == 0 ? out : err) << buffer.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    detail::apply_environment(cfg);
    if (!conference_flags.empty()) cfg.conferences = conference_flags;
    auto t = embed::technique_from_name(technique_name);
    if (!t) throw ConfigError("technique: unknown name \"" + technique_name + "\"");
    cfg.technique = *t;
    cfg.train.deterministic = !parallel && cfg.train.deterministic;

    const JsonlLogger log(err, cfg.log_level);

    if (build->parsed()) {
      log.log("info", "build.start", {{"input", cfg.input_dir}, {"output", cfg.output_dir}});
      pipeline::BuildSummary s = pipeline::run_build(cfg);
      log.log("info", "build.done",
              {{"records", s.records}, {"triples", s.triples}, {"stubs", s.stubs}});
      out << "build: " << s.records << " records -> " << s.triples << " triples ("
          << s.stubs << " stub entities, " << s.papers_with_code
          << " papers with code) in " << cfg.output_dir << "\n";
    } else if (link->parsed()) {
      log.log("info", "link.start", {{"output", cfg.output_dir}});
      pipeline::LinkSummary s = pipeline::run_link(cfg);
      log.log("info", "link.done",
              {{"authors_linked", s.report.authors.linked},
               {"authors_total", s.report.authors.total},
               {"sameas_triples", s.sameas_triples}});
      out << "link: authors " << s.report.authors.linked << "/" << s.report.authors.total
          << " linked (step1 " << s.step1 << ", step2 " << s.step2 << ", errored "
          << s.report.authors.errored << "); papers " << s.report.papers.linked << "/"
          << s.report.papers.total << ", conferences " << s.report.conferences.linked << "/"
          << s.report.conferences.total << ", datasets " << s.report.datasets.linked << "/"
          << s.report.datasets.total << "; graph now " << s.triples << " triples\n";
    } else if (stats->parsed()) {
      log.log("info", "stats.start", {{"output", cfg.output_dir}});
      pipeline::StatsSummary s = pipeline::run_stats(cfg);
      log.log("info", "stats.done", {{"triples", s.graph_stats.triple_count}});
      out << "stats: " << s.graph_stats.triple_count << " triples, "
          << s.graph_stats.papers_with_evaluations << " papers with evaluations, "
          << s.histograms.size() << " conference histograms in " << cfg.output_dir << "\n";
    } else if (embed_cmd->parsed()) {
      log.log("info", "embed.start",
              {{"technique", embed::technique_name(cfg.technique)},
               {"dim", cfg.train.dim},
               {"seed", cfg.train.seed}});
      pipeline::EmbedSummary s = pipeline::run_embed(cfg);
      log.log("info", "embed.done",
              {{"returned_epoch", s.result.returned_epoch},
               {"stopped_early", s.result.stopped_early},
               {"mean_rank_filtered", s.result.report.mean_rank_filtered}});
      out << "embed: " << embed::technique_name(cfg.technique) << " d=" << cfg.train.dim
          << " seed=" << cfg.train.seed << " -> epoch " << s.result.returned_epoch
          << (s.result.stopped_early ? " (early stop)" : "") << ", filtered mean rank "
          << s.result.report.mean_rank_filtered << ", hits@10 " << s.result.report.hits10
          << "\n";
    } else if (validate->parsed()) {
      log.log("info", "validate.start", {{"input", cfg.input_dir}});
      pipeline::ValidationSummary s = pipeline::run_validate(cfg);
      log.log(s.ok() ? "info" : "error", "validate.done",
              {{"violations", s.violations.size()}, {"warnings", s.warnings}});
      if (s.ok()) {
        out << "validate: OK (" << s.records << " records, " << s.triples << " triples, "
            << s.warnings << " ingest warnings)\n";
      } else {
        out << "validate: FAILED with " << s.violations.size() << " violations\n";
        const std::size_t shown = std::min<std::size_t>(s.violations.size(), 20);
        for (std::size_t i = 0; i < shown; ++i) out << "  " << s.violations[i] << "\n";
        if (shown < s.violations.size()) {
          out << "  ... " << (s.violations.size() - shown) << " more\n";
        }
        return kExitValidation;
      }
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << nlohmann::json{{"level", "error"}, {"event", "usage"}, {"error", e.what()}}.dump()
        << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << nlohmann::json{{"level", "error"}, {"event", "io"}, {"error", e.what()}}.dump()
        << '\n';
    return kExitIo;
  } catch (const CatalogUnavailableError& e) {
    err << nlohmann::json{{"level", "error"}, {"event", "catalog"}, {"error", e.what()}}.dump()
        << '\n';
    return kExitIo;
  } catch (const SinkWriteError& e) {
    err << nlohmann::json{{"level", "error"}, {"event", "io"}, {"error", e.what()}}.dump()
        << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << nlohmann::json{{"level", "error"}, {"event", "failed"}, {"error", e.what()}}.dump()
        << '\n';
    return kExitValidation;
  }
}

inline int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace kgforge::cli
