// End-to-end pipeline tests: record-to-graph transform, schema conformance
// checking, the five run commands on the bundled mini dump, and the CLI
// front end (config file handling and exit codes).
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kgforge/cli.hpp"
#include "kgforge/config.hpp"
#include "kgforge/manifest.hpp"
#include "kgforge/pipeline.hpp"

using namespace kgforge;
namespace fs = std::filesystem;

namespace {

const char* kFixtureDir = KGFORGE_FIXTURE_DIR;
const char* kGoldenDir = KGFORGE_GOLDEN_DIR;

std::string fixture(const std::string& name) { return std::string(kFixtureDir) + "/" + name; }

// Fresh temp directory per test, removed on destruction.
struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "kgforge-test-XXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in) << path;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const ontology::Registry& registry() {
  static ontology::Registry r = ontology::default_registry();
  return r;
}

const ontology::UriMinter& minter() {
  static ontology::UriMinter m(registry(), ontology::default_policy());
  return m;
}

rdf::Term iri(std::string s) { return rdf::Term::iri(std::move(s)); }
rdf::Term type_term() { return iri(std::string(rdf::iris::rdf_type)); }

bool graph_has_line(const rdf::GraphBuffer& g, const std::string& line) {
  for (const rdf::Triple& t : g) {
    if (t.to_ntriples() == line) return true;
  }
  return false;
}

std::size_t count_violations(const std::vector<std::string>& violations,
                             const std::string& needle) {
  std::size_t n = 0;
  for (const std::string& v : violations) {
    if (v.find(needle) != std::string::npos) ++n;
  }
  return n;
}

pipeline::RunConfig mini_config(const TempDir& out) {
  pipeline::RunConfig cfg;
  cfg.input_dir = fixture("pwc-mini");
  cfg.output_dir = out.str();
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// Conference expansion
// ---------------------------------------------------------------------------

TEST(ConferenceAcronym, StripsTrailingNumericSegmentsAndUppercases) {
  EXPECT_EQ(pipeline::conference_acronym("neurips-2017-12"), "NEURIPS");
  EXPECT_EQ(pipeline::conference_acronym("naacl-2019-6"), "NAACL");
  EXPECT_EQ(pipeline::conference_acronym("iclr-2015-5"), "ICLR");
  EXPECT_EQ(pipeline::conference_acronym("acl"), "ACL");
}

TEST(ConferenceAcronym, KeepsNonNumericTailsAndLoneNumbers) {
  EXPECT_EQ(pipeline::conference_acronym("coling-spring"), "COLING-SPRING");
  // A slug that is nothing but a number has no alphabetic base to recover.
  EXPECT_EQ(pipeline::conference_acronym("2014"), "2014");
}

TEST(ConferenceRecord, CarriesNameAndAcronym) {
  ingest::EntityRecord rec = pipeline::conference_record("emnlp-2014-10");
  EXPECT_EQ(rec.class_name, "Conference");
  EXPECT_EQ(rec.slug, "emnlp-2014-10");
  ASSERT_EQ(rec.scalars.size(), 2u);
  EXPECT_EQ(rec.scalars[0], (std::pair<std::string, std::string>{"conferenceName",
                                                                 "emnlp-2014-10"}));
  EXPECT_EQ(rec.scalars[1], (std::pair<std::string, std::string>{"acronym", "EMNLP"}));
}

// ---------------------------------------------------------------------------
// GraphAssembler
// ---------------------------------------------------------------------------

TEST(GraphAssembler, TypesLiteralsFromTheSchemaRanges) {
  rdf::GraphBuffer g;
  pipeline::GraphAssembler assembler(g, minter(), registry());

  ingest::EntityRecord paper;
  paper.class_name = "Paper";
  paper.slug = "typing-probe";
  paper.scalars = {{"title", "Typing Probe"},
                   {"date", "2020-01-02"},
                   {"urlPdf", "https://example.org/p.pdf"}};
  assembler.add_record(paper);

  ingest::EntityRecord repo;
  repo.class_name = "Repository";
  repo.slug = "repo-probe";
  repo.scalars = {{"isOfficial", "true"}};
  assembler.add_record(repo);

  ingest::EntityRecord method;
  method.class_name = "Method";
  method.slug = "method-probe";
  method.scalars = {{"introducedYear", "2014"}};
  assembler.add_record(method);
  assembler.finalize();

  const std::string p = "<https://linkedpaperswithcode.com/paper/typing-probe>";
  EXPECT_TRUE(graph_has_line(
      g, p + " <https://linkedpaperswithcode.com/ontology/title> \"Typing Probe\" ."));
  EXPECT_TRUE(graph_has_line(
      g, p + " <https://linkedpaperswithcode.com/ontology/date> "
             "\"2020-01-02\"^^<http://www.w3.org/2001/XMLSchema#date> ."));
  EXPECT_TRUE(graph_has_line(
      g, p + " <https://linkedpaperswithcode.com/ontology/urlPdf> "
             "\"https://example.org/p.pdf\"^^<http://www.w3.org/2001/XMLSchema#anyURI> ."));
  EXPECT_TRUE(graph_has_line(
      g, "<https://linkedpaperswithcode.com/repository/repo-probe> "
         "<https://linkedpaperswithcode.com/ontology/isOfficial> "
         "\"true\"^^<http://www.w3.org/2001/XMLSchema#boolean> ."));
  EXPECT_TRUE(graph_has_line(
      g, "<https://linkedpaperswithcode.com/method/method-probe> "
         "<https://linkedpaperswithcode.com/ontology/introducedYear> "
         "\"2014\"^^<http://www.w3.org/2001/XMLSchema#gYear> ."));
}

TEST(GraphAssembler, StripsMarkdownFromDescriptiveText) {
  rdf::GraphBuffer g;
  pipeline::GraphAssembler assembler(g, minter(), registry());

  ingest::EntityRecord paper;
  paper.class_name = "Paper";
  paper.slug = "markdown-probe";
  paper.scalars = {{"abstract", "We study **bold** claims and [links](https://x.test)."},
                   {"title", "Markdown *stays* here"}};
  assembler.add_record(paper);
  assembler.finalize();

  const std::string p = "<https://linkedpaperswithcode.com/paper/markdown-probe>";
  EXPECT_TRUE(graph_has_line(
      g, p + " <https://linkedpaperswithcode.com/ontology/abstract> "
             "\"We study bold claims and links.\" ."));
  // Only descriptions are treated as markdown; titles pass through.
  EXPECT_TRUE(graph_has_line(
      g, p + " <https://linkedpaperswithcode.com/ontology/title> \"Markdown *stays* here\" ."));
}

TEST(GraphAssembler, MaterializesLabelledStubsForUndescribedTargets) {
  rdf::GraphBuffer g;
  pipeline::GraphAssembler assembler(g, minter(), registry());

  ingest::EntityRecord paper;
  paper.class_name = "Paper";
  paper.slug = "stub-probe";
  paper.links = {{"hasTask", {"Task", "ghost-task", "Ghost Task"}},
                 {"hasMethod", {"Method", "known-method", "Known Method"}}};
  assembler.add_record(paper);

  ingest::EntityRecord method;  // described later: must not become a stub
  method.class_name = "Method";
  method.slug = "known-method";
  method.scalars = {{"methodName", "The Known Method"}};
  assembler.add_record(method);

  EXPECT_EQ(assembler.finalize(), 1u);
  EXPECT_TRUE(graph_has_line(
      g, "<https://linkedpaperswithcode.com/task/ghost-task> "
         "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type> "
         "<https://linkedpaperswithcode.com/ontology/Task> ."));
  EXPECT_TRUE(graph_has_line(
      g, "<https://linkedpaperswithcode.com/task/ghost-task> "
         "<https://linkedpaperswithcode.com/ontology/taskName> \"Ghost Task\" ."));
  // The described method kept its own name, no stub overwrite.
  EXPECT_TRUE(graph_has_line(
      g, "<https://linkedpaperswithcode.com/method/known-method> "
         "<https://linkedpaperswithcode.com/ontology/methodName> \"The Known Method\" ."));
  EXPECT_FALSE(graph_has_line(
      g, "<https://linkedpaperswithcode.com/method/known-method> "
         "<https://linkedpaperswithcode.com/ontology/methodName> \"Known Method\" ."));
}

TEST(GraphAssembler, ConferenceStubsGetSlugNameAndDerivedAcronym) {
  rdf::GraphBuffer g;
  pipeline::GraphAssembler assembler(g, minter(), registry());

  ingest::EntityRecord paper;
  paper.class_name = "Paper";
  paper.slug = "conf-probe";
  paper.links = {{"publishedIn", {"Conference", "icml-2015-7", "icml-2015-7"}}};
  assembler.add_record(paper);
  EXPECT_EQ(assembler.finalize(), 1u);

  EXPECT_TRUE(graph_has_line(
      g, "<https://linkedpaperswithcode.com/conference/icml-2015-7> "
         "<https://linkedpaperswithcode.com/ontology/conferenceName> \"icml-2015-7\" ."));
  EXPECT_TRUE(graph_has_line(
      g, "<https://linkedpaperswithcode.com/conference/icml-2015-7> "
         "<https://linkedpaperswithcode.com/ontology/acronym> \"ICML\" ."));
  ASSERT_EQ(assembler.conference_stubs().size(), 1u);
  EXPECT_EQ(assembler.conference_stubs()[0].slug, "icml-2015-7");
}

TEST(GraphAssembler, DropsScalarsThatNormalizeToNothing) {
  rdf::GraphBuffer g;
  pipeline::GraphAssembler assembler(g, minter(), registry());

  ingest::EntityRecord task;
  task.class_name = "Task";
  task.slug = "empty-desc";
  task.scalars = {{"taskName", "Empty Desc"}, {"taskDescription", "###"}};
  assembler.add_record(task);
  assembler.finalize();

  for (const rdf::Triple& t : g) {
    EXPECT_EQ(t.predicate.value().find("taskDescription"), std::string::npos)
        << t.to_ntriples();
  }
}

// ---------------------------------------------------------------------------
// Conformance checking
// ---------------------------------------------------------------------------

TEST(CheckConformance, AcceptsACleanInstanceGraph) {
  rdf::GraphBuffer g;
  pipeline::GraphAssembler assembler(g, minter(), registry());
  ingest::EntityRecord paper;
  paper.class_name = "Paper";
  paper.slug = "clean-probe";
  paper.scalars = {{"title", "Clean"}, {"date", "2019-05-05"}};
  paper.links = {{"hasTask", {"Task", "some-task", "Some Task"}}};
  assembler.add_record(paper);
  assembler.finalize();

  EXPECT_TRUE(pipeline::check_conformance(g, registry()).empty());
}

TEST(CheckConformance, FlagsEachViolationKind) {
  const std::string base = "https://linkedpaperswithcode.com/";
  const std::string ont = base + "ontology/";
  rdf::GraphBuffer g;
  // A well-typed paper used as the anchor subject.
  g.insert({iri(base + "paper/p1"), type_term(), iri(ont + "Paper")});
  // Untyped subject.
  g.insert({iri(base + "paper/naked"), iri(ont + "title"), rdf::Term::literal("x")});
  // Wrong domain: taskName on a Paper.
  g.insert({iri(base + "paper/p1"), iri(ont + "taskName"), rdf::Term::literal("t")});
  // Wrong literal datatype: plain string where xsd:date is declared.
  g.insert({iri(base + "paper/p1"), iri(ont + "date"), rdf::Term::literal("2020-01-01")});
  // Unregistered predicate.
  g.insert({iri(base + "paper/p1"), iri(ont + "fooBar"), rdf::Term::literal("y")});
  // Object property to an untyped target.
  g.insert({iri(base + "paper/p1"), iri(ont + "hasTask"), iri(base + "task/ghost")});
  // Object property to a target of the wrong class.
  g.insert({iri(base + "dataset/d1"), type_term(), iri(ont + "Dataset")});
  g.insert({iri(base + "paper/p1"), iri(ont + "hasMethod"), iri(base + "dataset/d1")});
  // Subject typed twice.
  g.insert({iri(base + "task/twice"), type_term(), iri(ont + "Task")});
  g.insert({iri(base + "task/twice"), type_term(), iri(ont + "Area")});

  std::vector<std::string> v = pipeline::check_conformance(g, registry());
  EXPECT_EQ(count_violations(v, "no rdf:type"), 1u);  // only subjects are surveyed
  EXPECT_EQ(count_violations(v, "taskName used on class Paper"), 1u);
  EXPECT_EQ(count_violations(v, "schema says http://www.w3.org/2001/XMLSchema#date"), 1u);
  EXPECT_EQ(count_violations(v, "not in the schema"), 1u);
  EXPECT_EQ(count_violations(v, "untyped target of hasTask"), 1u);
  EXPECT_EQ(count_violations(v, "hasMethod expects Method, found Dataset"), 1u);
  EXPECT_EQ(count_violations(v, "2 classes"), 1u);
}

TEST(CheckConformance, SameAsObjectsMayPointAnywhere) {
  const std::string base = "https://linkedpaperswithcode.com/";
  const std::string ont = base + "ontology/";
  rdf::GraphBuffer g;
  g.insert({iri(base + "paper/p1"), type_term(), iri(ont + "Paper")});
  g.insert({iri(base + "paper/p1"), iri(std::string(rdf::iris::owl_same_as)),
            iri("https://semopenalex.org/work/W1")});
  EXPECT_TRUE(pipeline::check_conformance(g, registry()).empty());
}

// ---------------------------------------------------------------------------
// run_build / run_validate on the bundled mini dump
// ---------------------------------------------------------------------------

TEST(RunBuild, ReproducesTheFrozenGoldenArtifacts) {
  TempDir out;
  pipeline::BuildSummary s = pipeline::run_build(mini_config(out));
  EXPECT_EQ(s.records, 84u);
  EXPECT_EQ(s.triples, 542u);
  EXPECT_EQ(s.papers_with_code, 8u);

  for (const char* name : {"lpwc.nt", "void.ttl", "lpwc-ontology.ttl"}) {
    EXPECT_EQ(read_file(out.str() + "/" + name),
              read_file(std::string(kGoldenDir) + "/" + name))
        << name << " drifted from the frozen golden copy";
  }
}

TEST(RunBuild, WritesAManifestCoveringEveryArtifact) {
  TempDir out;
  pipeline::run_build(mini_config(out));
  nlohmann::json doc = nlohmann::json::parse(read_file(out.str() + "/manifest.json"));
  EXPECT_EQ(doc["tool"], "kgforge");
  EXPECT_EQ(doc["command"], "build");
  EXPECT_EQ(doc["inputs"].size(), 5u);   // all five dump files
  EXPECT_EQ(doc["outputs"].size(), 4u);  // graph, ontology, void, ingest report
  for (const auto& [path, digest] : doc["outputs"].items()) {
    EXPECT_EQ(manifest::sha256_file(path), digest.get<std::string>());
  }
}

TEST(RunValidate, PassesOnTheBundledDump) {
  pipeline::RunConfig cfg;
  cfg.input_dir = fixture("pwc-mini");
  pipeline::ValidationSummary s = pipeline::run_validate(cfg);
  EXPECT_TRUE(s.ok()) << (s.violations.empty() ? "" : s.violations.front());
  EXPECT_EQ(s.records, 84u);
  EXPECT_EQ(s.triples, 542u);
}

// ---------------------------------------------------------------------------
// run_link
// ---------------------------------------------------------------------------

TEST(RunLink, LinksAuthorsPapersConferencesAndDatasets) {
  TempDir out;
  pipeline::RunConfig cfg = mini_config(out);
  pipeline::run_build(cfg);

  cfg.catalog_fixture = fixture("catalog-mini.json");
  pipeline::LinkSummary s = pipeline::run_link(cfg);

  EXPECT_EQ(s.report.authors.total, 48u);
  EXPECT_EQ(s.report.authors.linked, 10u);
  EXPECT_EQ(s.step1, 5u);
  EXPECT_EQ(s.step2, 5u);
  EXPECT_EQ(s.report.authors.errored, 0u);
  EXPECT_EQ(s.report.papers.linked, 6u);
  EXPECT_EQ(s.report.papers.total, 12u);
  EXPECT_EQ(s.report.conferences.linked, 9u);   // no ICML entry in the fixture
  EXPECT_EQ(s.report.conferences.total, 10u);
  EXPECT_EQ(s.report.datasets.linked, 2u);      // no WMT 2014 entry in the fixture
  EXPECT_EQ(s.report.datasets.total, 3u);

  const std::string graph = read_file(out.str() + "/lpwc.nt");
  EXPECT_NE(graph.find("<https://linkedpaperswithcode.com/author/ashish-vaswani> "
                       "<http://www.w3.org/2002/07/owl#sameAs> "
                       "<https://semopenalex.org/author/A100> ."),
            std::string::npos);
  EXPECT_NE(graph.find("<https://linkedpaperswithcode.com/dataset/imagenet> "
                       "<http://www.w3.org/2002/07/owl#sameAs> "
                       "<https://www.wikidata.org/entity/Q28080134> ."),
            std::string::npos);
}

TEST(RunLink, IsIdempotentOnASecondRun) {
  TempDir out;
  pipeline::RunConfig cfg = mini_config(out);
  pipeline::run_build(cfg);
  cfg.catalog_fixture = fixture("catalog-mini.json");

  pipeline::LinkSummary first = pipeline::run_link(cfg);
  const std::string graph_after_first = read_file(out.str() + "/lpwc.nt");
  pipeline::LinkSummary second = pipeline::run_link(cfg);

  EXPECT_EQ(first.triples, second.triples);
  EXPECT_EQ(read_file(out.str() + "/lpwc.nt"), graph_after_first);
  // Nothing new lands the second time: every statement already exists.
  EXPECT_EQ(second.sameas_triples, 0u);
}

TEST(RunLink, FailsWithIoErrorWhenBuildNeverRan) {
  TempDir out;
  pipeline::RunConfig cfg = mini_config(out);
  cfg.catalog_fixture = fixture("catalog-mini.json");
  EXPECT_THROW(pipeline::run_link(cfg), IoError);
}

// ---------------------------------------------------------------------------
// run_stats / run_embed
// ---------------------------------------------------------------------------

TEST(RunStats, CountsAgreeWithTheSerializedGraph) {
  TempDir out;
  pipeline::RunConfig cfg = mini_config(out);
  pipeline::run_build(cfg);
  cfg.conferences = {"naacl-2019-6", "nowhere"};
  pipeline::StatsSummary s = pipeline::run_stats(cfg);

  // Triple count equals the number of lines in the serialized graph.
  const std::string graph = read_file(out.str() + "/lpwc.nt");
  std::size_t lines = 0;
  for (char c : graph) lines += c == '\n';
  EXPECT_EQ(s.graph_stats.triple_count, lines);

  ASSERT_EQ(s.histograms.size(), 2u);
  EXPECT_TRUE(s.histograms[0].found);
  EXPECT_FALSE(s.histograms[1].found);

  const std::string metrics_csv = read_file(out.str() + "/stats-metrics.csv");
  EXPECT_NE(metrics_csv.find("naacl-2019-6,EM,1"), std::string::npos);
  EXPECT_NE(metrics_csv.find("nowhere,,unknown"), std::string::npos);
}

TEST(RunEmbed, ExportsOneRowPerEntityAndRelation) {
  TempDir out;
  pipeline::RunConfig cfg = mini_config(out);
  pipeline::run_build(cfg);
  cfg.train.dim = 8;
  cfg.train.max_epochs = 20;
  cfg.train.eval_interval = 10;
  pipeline::EmbedSummary s = pipeline::run_embed(cfg);

  auto data_lines = [](const std::string& body) {
    std::size_t n = 0;
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') ++n;
    }
    return n;
  };
  EXPECT_EQ(data_lines(read_file(out.str() + "/entities.tsv")), s.entities);
  EXPECT_EQ(data_lines(read_file(out.str() + "/relations.tsv")), s.relations);
  EXPECT_EQ(s.result.log.size(), 20u);

  nlohmann::json report = nlohmann::json::parse(read_file(out.str() + "/eval-report.json"));
  EXPECT_EQ(report["technique"], "transe");
  EXPECT_EQ(report["checkpoints"].size(), 2u);
}

// ---------------------------------------------------------------------------
// Config file parsing
// ---------------------------------------------------------------------------

TEST(ConfigFile, ParsesTrimsAndSkipsComments) {
  std::istringstream in("# run settings\n"
                        "input = /data/dump\n"
                        "\n"
                        "  min-sim =  0.95 \n");
  std::vector<config::Setting> settings = config::parse(in, "test.conf");
  ASSERT_EQ(settings.size(), 2u);
  EXPECT_EQ(settings[0].key, "input");
  EXPECT_EQ(settings[0].value, "/data/dump");
  EXPECT_EQ(settings[1].key, "min-sim");
  EXPECT_EQ(settings[1].value, "0.95");
}

TEST(ConfigFile, RejectsLinesWithoutAnEquals) {
  std::istringstream in("input /data/dump\n");
  EXPECT_THROW(config::parse(in, "test.conf"), ConfigError);
}

TEST(ApplySetting, MapsKeysOntoTheRunConfig) {
  pipeline::RunConfig cfg;
  cli::apply_setting(cfg, "min-sim", "0.85");
  cli::apply_setting(cfg, "technique", "rotate");
  cli::apply_setting(cfg, "conferences", "naacl-2019-6, emnlp-2014-10");
  cli::apply_setting(cfg, "deterministic", "false");
  EXPECT_DOUBLE_EQ(cfg.min_sim, 0.85);
  EXPECT_EQ(cfg.technique, embed::Technique::RotatE);
  ASSERT_EQ(cfg.conferences.size(), 2u);
  EXPECT_EQ(cfg.conferences[1], "emnlp-2014-10");
  EXPECT_FALSE(cfg.train.deterministic);
}

TEST(ApplySetting, RejectsUnknownKeysAndBadValues) {
  pipeline::RunConfig cfg;
  EXPECT_THROW(cli::apply_setting(cfg, "no-such-key", "1"), ConfigError);
  EXPECT_THROW(cli::apply_setting(cfg, "min-sim", "high"), ConfigError);
  EXPECT_THROW(cli::apply_setting(cfg, "technique", "word2vec"), ConfigError);
  EXPECT_THROW(cli::apply_setting(cfg, "deterministic", "maybe"), ConfigError);
}

// ---------------------------------------------------------------------------
// CLI exit codes and config/flag precedence
// ---------------------------------------------------------------------------

namespace {

int run_cli(std::vector<std::string> args, std::string* stdout_text = nullptr,
            std::string* stderr_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (stdout_text) *stdout_text = out.str();
  if (stderr_text) *stderr_text = err.str();
  return code;
}

}  // namespace

TEST(Cli, ValidateOnTheBundledDumpExitsZero) {
  std::string out;
  EXPECT_EQ(run_cli({"validate", "-i", fixture("pwc-mini")}, &out), 0);
  EXPECT_NE(out.find("validate: OK"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}), 2);                             // missing subcommand
  EXPECT_EQ(run_cli({"build", "--no-such-flag"}), 2);    // unknown flag
  EXPECT_EQ(run_cli({"build"}), 2);                      // no input directory
  TempDir out;
  EXPECT_EQ(run_cli({"link", "-i", fixture("pwc-mini"), "-o", out.str()}), 2);  // no catalog
}

TEST(Cli, IoErrorsExitThree) {
  TempDir out;
  EXPECT_EQ(run_cli({"build", "-i", "/no/such/dir", "-o", out.str()}), 3);
  EXPECT_EQ(run_cli({"stats", "-o", out.str()}), 3);  // no graph built yet
  EXPECT_EQ(run_cli({"build", "--config", "/no/such/file.conf"}), 3);
}

TEST(Cli, HelpExitsZero) {
  std::string out;
  EXPECT_EQ(run_cli({"--help"}, &out), 0);
  EXPECT_NE(out.find("build"), std::string::npos);
  EXPECT_NE(out.find("validate"), std::string::npos);
}

TEST(Cli, FlagsOverrideTheConfigFile) {
  TempDir dir;
  const std::string conf = dir.str() + "/run.conf";
  {
    std::ofstream f(conf);
    f << "input = /from/config\n"
      << "dim = 64\n"
      << "seed = 7\n";
  }
  TempDir out;
  pipeline::run_build(mini_config(out));

  // The config file seeds the run; the explicit flag wins for dim.
  std::string stdout_text;
  const int code = run_cli({"embed", "--config", conf, "-o", out.str(), "--dim", "8",
                            "--epochs", "10", "--eval-interval", "10"},
                           &stdout_text);
  EXPECT_EQ(code, 0);
  EXPECT_NE(stdout_text.find("d=8"), std::string::npos);
  EXPECT_NE(stdout_text.find("seed=7"), std::string::npos);

  nlohmann::json doc =
      nlohmann::json::parse(read_file(out.str() + "/manifest.json"));
  EXPECT_EQ(doc["config"]["dim"], 8);
  EXPECT_EQ(doc["config"]["seed"], 7);
}

TEST(Cli, JsonlLogsLandOnStderrAndSummariesOnStdout) {
  TempDir out;
  std::string stdout_text, stderr_text;
  const int code = run_cli({"build", "-i", fixture("pwc-mini"), "-o", out.str()},
                           &stdout_text, &stderr_text);
  EXPECT_EQ(code, 0);
  EXPECT_EQ(stdout_text.rfind("build: ", 0), 0u);

  std::istringstream err(stderr_text);
  std::string line;
  std::size_t events = 0;
  while (std::getline(err, line)) {
    nlohmann::json doc = nlohmann::json::parse(line);  // throws on non-JSONL noise
    EXPECT_TRUE(doc.contains("event"));
    EXPECT_TRUE(doc.contains("level"));
    ++events;
  }
  EXPECT_EQ(events, 2u);  // build.start + build.done
}

TEST(Cli, LogLevelFiltersInfoEvents) {
  TempDir out;
  std::string stderr_text;
  const int code = run_cli({"build", "-i", fixture("pwc-mini"), "-o", out.str(),
                            "--log-level", "error"},
                           nullptr, &stderr_text);
  EXPECT_EQ(code, 0);
  EXPECT_TRUE(stderr_text.empty());
}

// ---------------------------------------------------------------------------
// Manifest digests
// ---------------------------------------------------------------------------

TEST(Manifest, Sha256MatchesAKnownVector) {
  TempDir dir;
  const std::string path = dir.str() + "/abc.txt";
  {
    std::ofstream f(path, std::ios::binary);
    f << "abc";
  }
  EXPECT_EQ(manifest::sha256_file(path),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, MissingFileThrowsIoError) {
  EXPECT_THROW(manifest::sha256_file("/no/such/file"), IoError);
}
