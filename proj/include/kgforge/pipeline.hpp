// End-to-end runs. This module turns validated dump records into the RDF
// graph (minting IRIs, typing every literal from the schema, materializing
// referenced-but-never-described entities as labelled stubs) and implements
// the five commands the CLI exposes: build, link, stats, embed, validate.
// Every command reads and writes plain files under a run directory and
// finishes by writing a manifest of input/output digests, so re-runs can be
// checked for byte identity.
#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgforge/catalog.hpp"
#include "kgforge/embed.hpp"
#include "kgforge/errors.hpp"
#include "kgforge/ingest.hpp"
#include "kgforge/linker.hpp"
#include "kgforge/manifest.hpp"
#include "kgforge/ontology.hpp"
#include "kgforge/rdf.hpp"
#include "kgforge/stats.hpp"
#include "kgforge/textnorm.hpp"

namespace kgforge::pipeline {

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string input_dir;   // directory holding the upstream dump files
  std::string output_dir;  // directory receiving every artifact

  // IRI minting
  std::string base_namespace = "https://linkedpaperswithcode.com/";

  // VoID metadata: stamped as dcterms:modified when non-empty (YYYY-MM-DD)
  std::string dump_date;

  // linking
  double min_sim = 0.90;
  bool case_sensitive_names = false;
  int workers = 4;
  std::string catalog_fixture;  // JSON fixture path; set -> no network
  std::string catalog_url;      // SPARQL endpoint, used when no fixture
  std::string cache_dir;        // catalog response cache dir; empty -> output_dir

  // stats
  std::vector<std::string> conferences;

  // embeddings
  embed::Technique technique = embed::Technique::TransE;
  embed::TrainConfig train;

  std::string log_level = "info";

  void require_input() const {
    if (input_dir.empty()) throw ConfigError("input directory is not set");
  }
  void require_output() const {
    if (output_dir.empty()) throw ConfigError("output directory is not set");
  }
};

// Artifact names, shared with the tests.
inline constexpr const char* kGraphFile = "lpwc.nt";
inline constexpr const char* kOntologyFile = "lpwc-ontology.ttl";
inline constexpr const char* kVoidFile = "void.ttl";
inline constexpr const char* kIngestReportFile = "ingest-report.jsonl";
inline constexpr const char* kLinkReportFile = "link-report.json";
inline constexpr const char* kEntitiesCsvFile = "stats-entities.csv";
inline constexpr const char* kMetricsCsvFile = "stats-metrics.csv";
inline constexpr const char* kStatsJsonFile = "stats.json";
inline constexpr const char* kEntityVectorsFile = "entities.tsv";
inline constexpr const char* kRelationVectorsFile = "relations.tsv";
inline constexpr const char* kEvalReportFile = "eval-report.json";
inline constexpr const char* kTrainLogFile = "train-log.csv";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kCatalogCacheFile = "catalog-cache.jsonl";

// ---------------------------------------------------------------------------
// Record-to-graph transform
// ---------------------------------------------------------------------------

// "neurips-2017-12" -> "NEURIPS": proceedings slugs end in numeric
// year/month segments; the leading alphabetic part is the series acronym.
inline std::string conference_acronym(const std::string& slug) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : slug) {
    if (c == '-') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  auto numeric = [](const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (c < '0' || c > '9') return false;
    }
    return true;
  };
  while (parts.size() > 1 && numeric(parts.back())) parts.pop_back();
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back('-');
    for (char c : parts[i]) {
      out.push_back(c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c);
    }
  }
  return out;
}

// The record a proceedings slug expands to. Conferences are never described
// by a dump file of their own, so the slug doubles as the display name.
inline ingest::EntityRecord conference_record(const std::string& slug) {
  ingest::EntityRecord rec;
  rec.class_name = "Conference";
  rec.slug = slug;
  rec.scalars.emplace_back("conferenceName", slug);
  const std::string acronym = conference_acronym(slug);
  if (!acronym.empty()) rec.scalars.emplace_back("acronym", acronym);
  return rec;
}

namespace detail {

// Properties whose values arrive as markdown and are emitted as plain text.
inline bool is_markdown_property(const std::string& prop) {
  return prop == "abstract" || prop == "taskDescription" || prop == "datasetDescription" ||
         prop == "methodDescription";
}

// Name property written onto a stub of the given class, if any.
inline const char* stub_name_property(const std::string& class_name) {
  if (class_name == "Task") return "taskName";
  if (class_name == "Dataset") return "datasetName";
  if (class_name == "Method") return "methodName";
  if (class_name == "Model") return "modelName";
  if (class_name == "Metric") return "metricName";
  if (class_name == "Area") return "areaName";
  return nullptr;
}

}  // namespace detail

// Streams records into a graph. Each record becomes a typed subject with one
// literal per scalar (datatyped from the schema range) and one link triple
// per reference. Link targets that no record ever describes are materialized
// by finalize() as stubs: a type statement plus the referencing record's raw
// name under the class's name property, so nothing in the graph dangles.
class GraphAssembler {
 public:
  GraphAssembler(rdf::GraphBuffer& graph, const ontology::UriMinter& minter,
                 const ontology::Registry& registry)
      : graph_(graph),
        minter_(minter),
        registry_(registry),
        type_(rdf::Term::iri(std::string(rdf::iris::rdf_type))) {}

  void add_record(const ingest::EntityRecord& rec) {
    ++records_;
    const rdf::Term subject = rdf::Term::iri(minter_.mint(rec.class_name, rec.slug));
    graph_.insert({subject, type_, class_term(rec.class_name)});
    const Key key{rec.class_name, rec.slug};
    described_.insert(key);
    pending_.erase(key);

    for (const auto& [prop, value] : rec.scalars) emit_scalar(subject, prop, value);
    for (const std::string& name : rec.author_names) {
      emit_scalar(subject, "authorName", name);
    }
    for (const auto& [prop, ref] : rec.links) {
      const rdf::Term target = rdf::Term::iri(minter_.mint(ref.class_name, ref.slug));
      graph_.insert({subject, property_term(prop), target});
      const Key target_key{ref.class_name, ref.slug};
      if (!described_.count(target_key)) pending_.emplace(target_key, ref.raw_name);
    }
  }

  // Materializes every referenced-but-undescribed entity. Returns the number
  // of stubs written.
  std::size_t finalize() {
    std::size_t stubs = 0;
    for (const auto& [key, raw_name] : pending_) {
      const auto& [class_name, slug] = key;
      if (described_.count(key)) continue;
      ++stubs;
      if (class_name == "Conference") {
        ingest::EntityRecord rec = conference_record(slug);
        const rdf::Term subject = rdf::Term::iri(minter_.mint("Conference", slug));
        graph_.insert({subject, type_, class_term("Conference")});
        for (const auto& [prop, value] : rec.scalars) emit_scalar(subject, prop, value);
        conference_stubs_.push_back(std::move(rec));
        continue;
      }
      const rdf::Term subject = rdf::Term::iri(minter_.mint(class_name, slug));
      graph_.insert({subject, type_, class_term(class_name)});
      const char* name_prop = detail::stub_name_property(class_name);
      if (name_prop && !raw_name.empty()) emit_scalar(subject, name_prop, raw_name);
    }
    pending_.clear();
    return stubs;
  }

  std::size_t records() const { return records_; }
  const std::vector<ingest::EntityRecord>& conference_stubs() const { return conference_stubs_; }

 private:
  using Key = std::pair<std::string, std::string>;  // (class, slug)

  rdf::Term class_term(const std::string& class_name) const {
    return rdf::Term::iri(registry_.require_class(class_name).uri);
  }
  rdf::Term property_term(const std::string& prop) const {
    return rdf::Term::iri(registry_.require_property(prop).uri);
  }

  void emit_scalar(const rdf::Term& subject, const std::string& prop, const std::string& value) {
    const ontology::PropertyDescriptor& desc = registry_.require_property(prop);
    std::string lexical =
        detail::is_markdown_property(prop) ? textnorm::strip_markdown(value) : value;
    if (lexical.empty()) return;
    rdf::Term object = desc.range == rdf::iris::xsd_string
                           ? rdf::Term::literal(std::move(lexical))
                           : rdf::Term::literal(std::move(lexical), desc.range);
    graph_.insert({subject, property_term(prop), std::move(object)});
  }

  rdf::GraphBuffer& graph_;
  const ontology::UriMinter& minter_;
  const ontology::Registry& registry_;
  rdf::Term type_;
  std::size_t records_ = 0;
  std::set<Key> described_;
  std::map<Key, std::string> pending_;  // first raw name wins
  std::vector<ingest::EntityRecord> conference_stubs_;
};

// ---------------------------------------------------------------------------
// Shared run plumbing
// ---------------------------------------------------------------------------

namespace detail {

// The schema namespace, recovered from a class URI (registry URIs are
// namespace + local name).
inline std::string schema_namespace(const ontology::Registry& registry) {
  const std::string& uri = registry.require_class("Paper").uri;
  return uri.substr(0, uri.size() - 5);
}

inline std::optional<std::string> find_dump(const std::string& dir, const char* base) {
  namespace fs = std::filesystem;
  for (const char* ext : {"", ".gz"}) {
    fs::path p = fs::path(dir) / (std::string(base) + ext);
    if (fs::exists(p)) return p.string();
  }
  return std::nullopt;
}

inline std::string out_path(const RunConfig& cfg, const char* name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << body;
  if (!out) throw SinkWriteError(path);
}

inline void serialize_to_file(const rdf::GraphBuffer& graph, rdf::Format format,
                              const std::string& path, const rdf::PrefixMap& prefixes = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  rdf::serialize(graph, format, out, prefixes);
}

inline void load_graph(const std::string& path, rdf::GraphBuffer& graph) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open graph (run build first?): " + path);
  rdf::parse_into(in, graph);
}

// Buffered read of one dump file; returns true when the file exists.
inline bool read_optional_dump(const std::string& dir, const char* base,
                               const ontology::Registry& registry, ingest::IngestReport& report,
                               std::vector<ingest::EntityRecord>& out,
                               std::vector<std::string>& inputs) {
  std::optional<std::string> path = find_dump(dir, base);
  if (!path) return false;
  ingest::read_dump_file(*path, registry, report,
                         [&](ingest::EntityRecord&& rec) { out.push_back(std::move(rec)); });
  inputs.push_back(*path);
  return true;
}

inline nlohmann::json common_config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  j["input"] = cfg.input_dir;
  j["output"] = cfg.output_dir;
  j["base-namespace"] = cfg.base_namespace;
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

struct BuildSummary {
  std::size_t records = 0;
  std::size_t stubs = 0;
  std::size_t triples = 0;
  std::size_t papers_with_code = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

// Ingests every dump file present in the input directory, assembles the
// instance graph, and writes graph + ontology + VoID + ingest report +
// manifest. The papers file is required; everything else is optional.
inline BuildSummary run_build(const RunConfig& cfg) {
  cfg.require_input();
  cfg.require_output();
  const ontology::Registry registry = ontology::default_registry();
  const ontology::UriMinter minter(registry, ontology::default_policy(cfg.base_namespace));
  std::filesystem::create_directories(cfg.output_dir);

  BuildSummary summary;
  ingest::IngestReport report;
  rdf::GraphBuffer graph;
  GraphAssembler assembler(graph, minter, registry);

  // Papers and repositories are buffered so repository rows can be joined
  // onto their papers before either side reaches the graph.
  std::vector<ingest::EntityRecord> papers;
  if (!detail::read_optional_dump(cfg.input_dir, "papers-with-abstracts.json", registry, report,
                                  papers, summary.inputs)) {
    throw IoError("papers-with-abstracts.json(.gz) not found in " + cfg.input_dir);
  }
  std::vector<ingest::EntityRecord> repos;
  if (detail::read_optional_dump(cfg.input_dir, "links-between-papers-and-code.json", registry,
                                 report, repos, summary.inputs)) {
    summary.papers_with_code =
        ingest::join_code_links(papers, repos, "links-between-papers-and-code.json", report);
  }
  for (const ingest::EntityRecord& rec : papers) assembler.add_record(rec);
  for (const ingest::EntityRecord& rec : repos) assembler.add_record(rec);

  for (const char* base :
       {"evaluation-tables.json", "methods.json", "datasets.json"}) {
    std::optional<std::string> path = detail::find_dump(cfg.input_dir, base);
    if (!path) continue;
    ingest::read_dump_file(*path, registry, report,
                           [&](ingest::EntityRecord&& rec) { assembler.add_record(rec); });
    summary.inputs.push_back(*path);
  }

  summary.stubs = assembler.finalize();
  summary.records = assembler.records();
  summary.triples = graph.size();

  const stats::GraphStats graph_stats = stats::count_entities(graph, registry);
  const rdf::PrefixMap prefixes =
      rdf::default_prefixes(cfg.base_namespace, detail::schema_namespace(registry));

  const std::string graph_path = detail::out_path(cfg, kGraphFile);
  detail::serialize_to_file(graph, rdf::Format::NTriples, graph_path);

  rdf::GraphBuffer ontology_graph;
  for (rdf::Triple& t : ontology::emit_ontology_triples(registry)) {
    ontology_graph.insert(std::move(t));
  }
  const std::string ontology_path = detail::out_path(cfg, kOntologyFile);
  detail::serialize_to_file(ontology_graph, rdf::Format::Turtle, ontology_path, prefixes);

  rdf::GraphBuffer void_graph;
  for (rdf::Triple& t :
       ontology::emit_void(graph_stats, cfg.dump_date, minter.policy(), registry)) {
    void_graph.insert(std::move(t));
  }
  const std::string void_path = detail::out_path(cfg, kVoidFile);
  detail::serialize_to_file(void_graph, rdf::Format::Turtle, void_path, prefixes);

  const std::string report_path = detail::out_path(cfg, kIngestReportFile);
  {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + report_path);
    report.write_jsonl(out);
  }

  summary.outputs = {graph_path, ontology_path, void_path, report_path};

  manifest::Manifest m;
  m.command = "build";
  m.config = detail::common_config_echo(cfg);
  m.config["dump-date"] = cfg.dump_date;
  for (const std::string& p : summary.inputs) m.add_input(p);
  for (const std::string& p : summary.outputs) m.add_output(p);
  m.write(detail::out_path(cfg, kManifestFile));
  return summary;
}

// ---------------------------------------------------------------------------
// link
// ---------------------------------------------------------------------------

struct LinkSummary {
  linker::LinkReport report;
  std::size_t step1 = 0;
  std::size_t step2 = 0;
  linker::MutationSummary applied;
  std::size_t sameas_triples = 0;
  std::size_t triples = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

inline std::unique_ptr<catalog::CatalogClient> make_catalog(const RunConfig& cfg) {
  if (!cfg.catalog_fixture.empty()) {
    return std::make_unique<catalog::FixtureCatalog>(
        catalog::FixtureCatalog::from_file(cfg.catalog_fixture));
  }
  if (cfg.catalog_url.empty()) {
    throw ConfigError("linking needs --catalog-fixture or --catalog-url "
                      "(or the KGFORGE_CATALOG_URL environment variable)");
  }
  catalog::RemoteOptions options;
  const std::string cache_dir = cfg.cache_dir.empty() ? cfg.output_dir : cfg.cache_dir;
  std::filesystem::create_directories(cache_dir);
  options.cache_path = (std::filesystem::path(cache_dir) / kCatalogCacheFile).string();
  return std::make_unique<catalog::RemoteCatalog>(cfg.catalog_url, options);
}

// Disambiguates author mentions against the catalog, links papers,
// conferences, and datasets via owl:sameAs, applies everything to the built
// graph, and re-serializes graph + VoID (linkset counts change) + report.
inline LinkSummary run_link(const RunConfig& cfg) {
  cfg.require_input();
  cfg.require_output();
  const ontology::Registry registry = ontology::default_registry();
  const ontology::UriMinter minter(registry, ontology::default_policy(cfg.base_namespace));

  LinkSummary summary;
  // Catalog configuration problems are usage errors; surface them before any
  // graph or dump I/O happens.
  std::unique_ptr<catalog::CatalogClient> catalog = make_catalog(cfg);
  if (!cfg.catalog_fixture.empty()) summary.inputs.push_back(cfg.catalog_fixture);

  rdf::GraphBuffer graph;
  const std::string graph_path = detail::out_path(cfg, kGraphFile);
  detail::load_graph(graph_path, graph);
  summary.inputs.push_back(graph_path);

  ingest::IngestReport report;
  std::vector<ingest::EntityRecord> papers;
  if (!detail::read_optional_dump(cfg.input_dir, "papers-with-abstracts.json", registry, report,
                                  papers, summary.inputs)) {
    throw IoError("papers-with-abstracts.json(.gz) not found in " + cfg.input_dir);
  }
  std::vector<ingest::EntityRecord> datasets;
  detail::read_optional_dump(cfg.input_dir, "datasets.json", registry, report, datasets,
                             summary.inputs);

  linker::LinkerConfig linker_cfg;
  linker_cfg.min_sim = cfg.min_sim;
  linker_cfg.case_sensitive_names = cfg.case_sensitive_names;
  linker_cfg.workers = cfg.workers;

  const std::vector<linker::AuthorMention> mentions = linker::extract_author_mentions(papers);
  const std::vector<linker::LinkDecision> decisions =
      linker::link_authors(mentions, *catalog, linker_cfg);
  for (const linker::LinkDecision& d : decisions) {
    ++summary.report.authors.total;
    if (d.linked) {
      ++summary.report.authors.linked;
      if (d.step == 1) ++summary.step1;
      if (d.step == 2) ++summary.step2;
    } else if (d.reason == "catalog-error") {
      ++summary.report.authors.errored;
    } else {
      ++summary.report.authors.unlinked;
    }
  }
  summary.applied = linker::apply_link_decisions(mentions, decisions, graph, minter, registry);

  // Conference records are reconstructed from the proceedings slugs the
  // papers reference: the same expansion the build stubs used.
  std::set<std::string> conference_slugs;
  for (const ingest::EntityRecord& p : papers) {
    for (const auto& [prop, ref] : p.links) {
      if (prop == "publishedIn") conference_slugs.insert(ref.slug);
    }
  }
  std::vector<ingest::EntityRecord> conferences;
  conferences.reserve(conference_slugs.size());
  for (const std::string& slug : conference_slugs) conferences.push_back(conference_record(slug));

  auto apply_sameas = [&](linker::SameAsKind kind,
                          const std::vector<ingest::EntityRecord>& records,
                          linker::KindReport& into) {
    linker::SameAsResult result = linker::link_sameas(kind, records, *catalog, minter);
    into = result.report;
    for (rdf::Triple& t : result.triples) {
      if (graph.insert(std::move(t))) ++summary.sameas_triples;
    }
  };
  apply_sameas(linker::SameAsKind::Paper, papers, summary.report.papers);
  apply_sameas(linker::SameAsKind::Conference, conferences, summary.report.conferences);
  apply_sameas(linker::SameAsKind::Dataset, datasets, summary.report.datasets);

  summary.triples = graph.size();
  detail::serialize_to_file(graph, rdf::Format::NTriples, graph_path);

  const stats::GraphStats graph_stats = stats::count_entities(graph, registry);
  rdf::GraphBuffer void_graph;
  for (rdf::Triple& t :
       ontology::emit_void(graph_stats, cfg.dump_date, minter.policy(), registry)) {
    void_graph.insert(std::move(t));
  }
  const std::string void_path = detail::out_path(cfg, kVoidFile);
  detail::serialize_to_file(
      void_graph, rdf::Format::Turtle, void_path,
      rdf::default_prefixes(cfg.base_namespace, detail::schema_namespace(registry)));

  const std::string report_path = detail::out_path(cfg, kLinkReportFile);
  {
    nlohmann::json doc;
    auto fill = [](const linker::KindReport& r) {
      nlohmann::json j;
      j["total"] = r.total;
      j["linked"] = r.linked;
      j["unlinked"] = r.unlinked;
      j["errored"] = r.errored;
      j["ratio"] = r.ratio();
      return j;
    };
    nlohmann::json authors = fill(summary.report.authors);
    authors["step1"] = summary.step1;
    authors["step2"] = summary.step2;
    nlohmann::json doc_out;
    doc_out["authors"] = authors;
    doc_out["papers"] = fill(summary.report.papers);
    doc_out["conferences"] = fill(summary.report.conferences);
    doc_out["datasets"] = fill(summary.report.datasets);
    doc_out["applied"] = {{"linked", summary.applied.linked_applied},
                          {"unlinked", summary.applied.unlinked_applied},
                          {"triples_added", summary.applied.triples_added},
                          {"sameas_triples", summary.sameas_triples}};
    detail::write_text_file(report_path, doc_out.dump(2) + "\n");
  }

  summary.outputs = {graph_path, void_path, report_path};

  manifest::Manifest m;
  m.command = "link";
  m.config = detail::common_config_echo(cfg);
  m.config["min-sim"] = cfg.min_sim;
  m.config["case-sensitive-names"] = cfg.case_sensitive_names;
  m.config["workers"] = cfg.workers;
  m.config["catalog"] = cfg.catalog_fixture.empty() ? cfg.catalog_url : cfg.catalog_fixture;
  for (const std::string& p : summary.inputs) m.add_input(p);
  for (const std::string& p : summary.outputs) m.add_output(p);
  m.write(detail::out_path(cfg, kManifestFile));
  return summary;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

struct StatsSummary {
  stats::GraphStats graph_stats;
  std::vector<stats::MetricHistogram> histograms;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

inline StatsSummary run_stats(const RunConfig& cfg) {
  cfg.require_output();
  const ontology::Registry registry = ontology::default_registry();

  StatsSummary summary;
  rdf::GraphBuffer graph;
  const std::string graph_path = detail::out_path(cfg, kGraphFile);
  detail::load_graph(graph_path, graph);
  summary.inputs.push_back(graph_path);

  summary.graph_stats = stats::count_entities(graph, registry);
  summary.histograms = stats::metric_distribution(graph, registry, cfg.conferences);

  const std::string entities_path = detail::out_path(cfg, kEntitiesCsvFile);
  {
    std::ofstream out(entities_path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + entities_path);
    stats::write_entities_csv(summary.graph_stats, out);
  }
  const std::string metrics_path = detail::out_path(cfg, kMetricsCsvFile);
  {
    std::ofstream out(metrics_path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + metrics_path);
    stats::write_metrics_csv(summary.histograms, out);
  }
  const std::string json_path = detail::out_path(cfg, kStatsJsonFile);
  detail::write_text_file(
      json_path, stats::stats_to_json(summary.graph_stats, summary.histograms).dump(2) + "\n");

  summary.outputs = {entities_path, metrics_path, json_path};

  manifest::Manifest m;
  m.command = "stats";
  m.config = detail::common_config_echo(cfg);
  m.config["conferences"] = cfg.conferences;
  for (const std::string& p : summary.inputs) m.add_input(p);
  for (const std::string& p : summary.outputs) m.add_output(p);
  m.write(detail::out_path(cfg, kManifestFile));
  return summary;
}

// ---------------------------------------------------------------------------
// embed
// ---------------------------------------------------------------------------

struct EmbedSummary {
  embed::TrainResult result;
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t triples = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

inline EmbedSummary run_embed(const RunConfig& cfg) {
  cfg.require_output();
  const ontology::Registry registry = ontology::default_registry();

  EmbedSummary summary;
  rdf::GraphBuffer graph;
  const std::string graph_path = detail::out_path(cfg, kGraphFile);
  detail::load_graph(graph_path, graph);
  summary.inputs.push_back(graph_path);

  const embed::IndexedGraph indexed = embed::index_graph(graph, registry);
  summary.entities = indexed.dicts.entities.size();
  summary.relations = indexed.dicts.relations.size();
  summary.triples = indexed.triples.size();

  summary.result = embed::train(cfg.technique, indexed.triples, summary.entities,
                                summary.relations, cfg.train);
  const embed::TrainResult& r = summary.result;

  const std::string entities_path = detail::out_path(cfg, kEntityVectorsFile);
  {
    std::ofstream out(entities_path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + entities_path);
    embed::export_table(r.model, indexed.dicts.entities, embed::ExportTable::Entities, out);
  }
  const std::string relations_path = detail::out_path(cfg, kRelationVectorsFile);
  {
    std::ofstream out(relations_path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + relations_path);
    embed::export_table(r.model, indexed.dicts.relations, embed::ExportTable::Relations, out);
  }

  const std::string log_path = detail::out_path(cfg, kTrainLogFile);
  {
    std::ostringstream body;
    body << "epoch,mean_loss\n";
    char buf[40];
    for (const embed::EpochLog& e : r.log) {
      std::snprintf(buf, sizeof buf, "%.17g", e.mean_loss);
      body << e.epoch << ',' << buf << '\n';
    }
    detail::write_text_file(log_path, body.str());
  }

  const std::string report_path = detail::out_path(cfg, kEvalReportFile);
  {
    nlohmann::json doc;
    doc["technique"] = embed::technique_name(r.model.technique);
    doc["dim"] = r.model.dim;
    doc["seed"] = r.model.seed;
    doc["entities"] = summary.entities;
    doc["relations"] = summary.relations;
    doc["triples"] = summary.triples;
    doc["returned_epoch"] = r.returned_epoch;
    doc["stopped_early"] = r.stopped_early;
    doc["deterministic"] = r.deterministic;
    doc["mean_rank_raw"] = r.report.mean_rank_raw;
    doc["mean_rank_filtered"] = r.report.mean_rank_filtered;
    doc["mrr"] = r.report.mrr;
    doc["hits1"] = r.report.hits1;
    doc["hits3"] = r.report.hits3;
    doc["hits10"] = r.report.hits10;
    doc["checkpoints"] = nlohmann::json::array();
    for (const embed::CheckpointMetric& c : r.report.history) {
      doc["checkpoints"].push_back(
          {{"epoch", c.epoch}, {"validation_mean_rank", c.validation_mean_rank}});
    }
    detail::write_text_file(report_path, doc.dump(2) + "\n");
  }

  summary.outputs = {entities_path, relations_path, log_path, report_path};

  manifest::Manifest m;
  m.command = "embed";
  m.config = detail::common_config_echo(cfg);
  m.config["technique"] = embed::technique_name(cfg.technique);
  m.config["dim"] = cfg.train.dim;
  m.config["epochs"] = cfg.train.max_epochs;
  m.config["eval-interval"] = cfg.train.eval_interval;
  m.config["learning-rate"] = cfg.train.learning_rate;
  m.config["margin"] = cfg.train.margin;
  m.config["negatives"] = cfg.train.negatives;
  m.config["batch-size"] = cfg.train.batch_size;
  m.config["seed"] = cfg.train.seed;
  m.config["patience"] = cfg.train.patience;
  m.config["deterministic"] = cfg.train.deterministic;
  for (const std::string& p : summary.inputs) m.add_input(p);
  for (const std::string& p : summary.outputs) m.add_output(p);
  m.write(detail::out_path(cfg, kManifestFile));
  return summary;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidationSummary {
  std::size_t records = 0;
  std::size_t triples = 0;
  std::size_t warnings = 0;  // ingest report entries that are not summaries
  std::vector<std::string> violations;
  std::vector<std::string> inputs;
  bool ok() const { return violations.empty(); }
};

// Schema conformance scan over an instance graph: every subject carries
// exactly one known class, every predicate is rdf:type, owl:sameAs, or a
// registered property used on its declared domain, and every object matches
// the declared range (target class for object properties, literal datatype
// for datatype properties). Returns one line per violation.
inline std::vector<std::string> check_conformance(const rdf::GraphBuffer& graph,
                                                  const ontology::Registry& registry) {
  std::vector<std::string> violations;

  std::map<std::string, std::string> class_by_uri;  // class IRI -> local name
  for (const ontology::ClassDescriptor& c : registry.classes()) {
    class_by_uri.emplace(c.uri, c.local_name);
  }
  std::map<std::string, const ontology::PropertyDescriptor*> prop_by_uri;
  for (const ontology::PropertyDescriptor& p : registry.properties()) {
    prop_by_uri.emplace(p.uri, &p);
  }

  const std::string type_iri(rdf::iris::rdf_type);
  const std::string sameas_iri(rdf::iris::owl_same_as);

  // First pass: the class of every typed subject.
  std::map<std::string, std::set<std::string>> classes_of;
  std::set<std::string> all_subjects;
  for (const rdf::Triple& t : graph) {
    all_subjects.insert(t.subject.value());
    if (t.predicate.value() != type_iri) continue;
    if (!t.object.is_iri()) {
      violations.push_back("subject " + t.subject.value() + ": literal rdf:type");
      continue;
    }
    auto cls = class_by_uri.find(t.object.value());
    if (cls == class_by_uri.end()) {
      violations.push_back("subject " + t.subject.value() + ": unknown class " +
                           t.object.value());
      continue;
    }
    classes_of[t.subject.value()].insert(cls->second);
  }
  for (const std::string& subject : all_subjects) {
    auto it = classes_of.find(subject);
    if (it == classes_of.end()) {
      violations.push_back("subject " + subject + ": no rdf:type");
    } else if (it->second.size() != 1) {
      violations.push_back("subject " + subject + ": " + std::to_string(it->second.size()) +
                           " classes");
    }
  }

  // Second pass: property conformance.
  for (const rdf::Triple& t : graph) {
    const std::string& pred = t.predicate.value();
    if (pred == type_iri) continue;
    if (pred == sameas_iri) continue;  // object is an external IRI by design
    auto pit = prop_by_uri.find(pred);
    if (pit == prop_by_uri.end()) {
      violations.push_back("predicate " + pred + ": not in the schema");
      continue;
    }
    const ontology::PropertyDescriptor& p = *pit->second;
    auto sit = classes_of.find(t.subject.value());
    if (sit != classes_of.end() && sit->second.size() == 1 &&
        *sit->second.begin() != p.domain_class) {
      violations.push_back("subject " + t.subject.value() + ": " + p.local_name +
                           " used on class " + *sit->second.begin());
    }
    if (p.kind == ontology::PropertyKind::Object) {
      if (!t.object.is_iri()) {
        violations.push_back("predicate " + p.local_name + ": literal object");
        continue;
      }
      auto oit = classes_of.find(t.object.value());
      if (oit == classes_of.end()) {
        violations.push_back("object " + t.object.value() + ": untyped target of " +
                             p.local_name);
      } else if (oit->second.size() == 1 && *oit->second.begin() != p.range) {
        violations.push_back("object " + t.object.value() + ": " + p.local_name + " expects " +
                             p.range + ", found " + *oit->second.begin());
      }
    } else {
      if (!t.object.is_literal()) {
        violations.push_back("predicate " + p.local_name +
                             ": IRI object on a datatype property");
        continue;
      }
      if (t.object.datatype() != p.range) {
        violations.push_back("predicate " + p.local_name + ": literal typed " +
                             t.object.datatype() + ", schema says " + p.range);
      }
    }
  }
  return violations;
}

// Builds the graph in memory from the dump and checks it with
// check_conformance; IRI uniqueness is enforced by the minter while the
// graph is assembled.
inline ValidationSummary run_validate(const RunConfig& cfg) {
  cfg.require_input();
  const ontology::Registry registry = ontology::default_registry();
  const ontology::UriMinter minter(registry, ontology::default_policy(cfg.base_namespace));

  ValidationSummary summary;
  ingest::IngestReport report;
  rdf::GraphBuffer graph;
  GraphAssembler assembler(graph, minter, registry);

  try {
    std::vector<ingest::EntityRecord> papers;
    if (!detail::read_optional_dump(cfg.input_dir, "papers-with-abstracts.json", registry,
                                    report, papers, summary.inputs)) {
      throw IoError("papers-with-abstracts.json(.gz) not found in " + cfg.input_dir);
    }
    std::vector<ingest::EntityRecord> repos;
    if (detail::read_optional_dump(cfg.input_dir, "links-between-papers-and-code.json", registry,
                                   report, repos, summary.inputs)) {
      ingest::join_code_links(papers, repos, "links-between-papers-and-code.json", report);
    }
    for (const ingest::EntityRecord& rec : papers) assembler.add_record(rec);
    for (const ingest::EntityRecord& rec : repos) assembler.add_record(rec);
    for (const char* base : {"evaluation-tables.json", "methods.json", "datasets.json"}) {
      std::optional<std::string> path = detail::find_dump(cfg.input_dir, base);
      if (!path) continue;
      ingest::read_dump_file(*path, registry, report,
                             [&](ingest::EntityRecord&& rec) { assembler.add_record(rec); });
      summary.inputs.push_back(*path);
    }
    assembler.finalize();
  } catch (const UriCollisionError& e) {
    summary.violations.emplace_back(e.what());
    return summary;
  }

  summary.records = assembler.records();
  summary.triples = graph.size();
  for (const ingest::ReportEntry& e : report.entries()) {
    if (e.kind != "summary") ++summary.warnings;
  }

  summary.violations = check_conformance(graph, registry);
  return summary;
}

}  // namespace kgforge::pipeline
