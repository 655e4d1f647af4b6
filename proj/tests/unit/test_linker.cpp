#include "kgforge/linker.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kgforge/catalog.hpp"
#include "kgforge/ingest.hpp"
#include "kgforge/ontology.hpp"

namespace linker = kgforge::linker;
namespace catalog = kgforge::catalog;
namespace ingest = kgforge::ingest;
namespace onto = kgforge::ontology;
namespace rdf = kgforge::rdf;
using linker::AuthorMention;
using linker::LinkDecision;

namespace {

catalog::FixtureCatalog& fixture_catalog() {
  static catalog::FixtureCatalog cat = catalog::FixtureCatalog::from_file(
      std::string(KGFORGE_FIXTURE_DIR) + "/catalog/fixture-catalog.json");
  return cat;
}

const onto::Registry& registry() {
  static onto::Registry reg = onto::default_registry();
  return reg;
}

const onto::UriMinter& minter() {
  static onto::UriMinter m(registry(), onto::default_policy());
  return m;
}

AuthorMention mention(const std::string& name, std::vector<std::string> titles) {
  AuthorMention m;
  m.name = name;
  m.mention_id = name;  // tests use the name as id for readability
  m.paper_titles = std::move(titles);
  for (std::size_t i = 0; i < m.paper_titles.size(); ++i) {
    m.paper_slugs.push_back("paper-" + std::to_string(i));
  }
  return m;
}

// Full-matrix Levenshtein, independent of the production two-row version.
std::size_t oracle_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    }
  }
  return d[a.size()][b.size()];
}

// Catalog stub with scriptable behavior, recording the order of calls.
class StubCatalog : public catalog::CatalogClient {
 public:
  std::vector<std::string> calls;
  std::vector<catalog::CatalogCandidate> candidates;
  std::vector<catalog::WorkHit> works;
  bool throw_on_candidates = false;
  bool throw_on_works = false;

  std::vector<catalog::CatalogCandidate> candidates_by_name(const std::string& name) override {
    calls.push_back("candidates:" + name);
    if (throw_on_candidates) throw kgforge::CatalogUnavailableError("stub");
    return candidates;
  }
  std::vector<catalog::WorkHit> works_by_title_variant(const std::string& variant) override {
    calls.push_back("works:" + variant);
    if (throw_on_works) throw kgforge::CatalogUnavailableError("stub");
    return works;
  }
  std::vector<std::string> conference_lookup(const std::string&, const std::string&) override {
    return {};
  }
  std::vector<std::string> dataset_lookup(const std::string&) override { return {}; }
};

}  // namespace

TEST(DisambiguateAuthor, StepOneExactNameAndTitleSubstring) {
  LinkDecision d = linker::disambiguate_author(
      mention("Ashish Vaswani", {"Attention Is All You Need"}), fixture_catalog());
  EXPECT_TRUE(d.linked);
  EXPECT_EQ(d.step, 1);
  EXPECT_DOUBLE_EQ(d.score, 1.0);
  EXPECT_EQ(d.external_iri, "https://semopenalex.org/author/A100");
}

TEST(DisambiguateAuthor, StepOneNameMatchIsCaseInsensitiveByDefault) {
  LinkDecision d = linker::disambiguate_author(
      mention("ashish vaswani", {"Attention Is All You Need"}), fixture_catalog());
  EXPECT_TRUE(d.linked);
  EXPECT_EQ(d.step, 1);

  // With strict casing the exact-name step misses ("Ashish Vaswani" in the
  // catalog), and the mention only links through the fuzzy title step.
  linker::LinkerConfig strict;
  strict.case_sensitive_names = true;
  LinkDecision d2 = linker::disambiguate_author(
      mention("ashish vaswani", {"Attention Is All You Need"}), fixture_catalog(), strict);
  EXPECT_TRUE(d2.linked);
  EXPECT_EQ(d2.step, 2);
  EXPECT_DOUBLE_EQ(d2.score, 1.0);
}

TEST(DisambiguateAuthor, StepOneSubstringWorksInEitherDirection) {
  // Mention title is a strict substring of the catalog work title.
  LinkDecision d = linker::disambiguate_author(
      mention("Jacob Devlin", {"BERT: Pre-training of Deep Bidirectional Transformers"}),
      fixture_catalog());
  EXPECT_TRUE(d.linked);
  EXPECT_EQ(d.step, 1);
  EXPECT_EQ(d.external_iri, "https://semopenalex.org/author/A300");
}

TEST(DisambiguateAuthor, StepOneTieBreaksByMatchCountThenIri) {
  // A402 matches two of the mention's titles, A401 only one.
  LinkDecision d = linker::disambiguate_author(
      mention("Jian Sun", {"Deep Residual Learning for Image Recognition",
                           "Faster R-CNN: Towards Real-Time Object Detection"}),
      fixture_catalog());
  EXPECT_TRUE(d.linked);
  EXPECT_EQ(d.external_iri, "https://semopenalex.org/author/A402");

  // A501 and A502 tie on match count; the smaller IRI wins.
  LinkDecision d2 = linker::disambiguate_author(
      mention("Wei Zhang", {"A Paper Shared by Two Authors of the Same Name"}),
      fixture_catalog());
  EXPECT_TRUE(d2.linked);
  EXPECT_EQ(d2.external_iri, "https://semopenalex.org/author/A501");
}

TEST(DisambiguateAuthor, StepTwoFuzzyMatchAtThreshold) {
  // No catalog author is named "jon smith", so step 1 fails; the title leads
  // to a work authored by "John Smith".
  LinkDecision d = linker::disambiguate_author(
      mention("jon smith", {"A Study of Name Matching"}), fixture_catalog());
  EXPECT_TRUE(d.linked);
  EXPECT_EQ(d.step, 2);
  EXPECT_EQ(d.external_iri, "https://semopenalex.org/author/A600");
  // Oracle: one edit over ten characters.
  const std::size_t dist = oracle_distance("jon smith", "john smith");
  EXPECT_EQ(dist, 1u);
  EXPECT_DOUBLE_EQ(d.score, 1.0 - static_cast<double>(dist) / 10.0);
  EXPECT_DOUBLE_EQ(d.score, 0.9);
}

TEST(DisambiguateAuthor, StepTwoRespectsThreshold) {
  linker::LinkerConfig strict;
  strict.min_sim = 0.95;  // 0.9 similarity no longer qualifies
  LinkDecision d = linker::disambiguate_author(
      mention("jon smith", {"A Study of Name Matching"}), fixture_catalog(), strict);
  EXPECT_FALSE(d.linked);
  EXPECT_EQ(d.reason, "no-match");
}

TEST(DisambiguateAuthor, NoCandidatesNoVariantsMeansNoMatch) {
  LinkDecision d = linker::disambiguate_author(
      mention("Nobody Anywhere", {"A Title Absent From Every Catalog"}), fixture_catalog());
  EXPECT_FALSE(d.linked);
  EXPECT_EQ(d.reason, "no-match");
  EXPECT_EQ(d.step, 0);
}

TEST(DisambiguateAuthor, StepOneSuccessShortCircuitsStepTwo) {
  StubCatalog stub;
  catalog::CatalogCandidate cand;
  cand.external_id = "https://e.org/a/1";
  cand.display_name = "Jane Doe";
  cand.work_titles = {"The Exact Same Paper"};
  stub.candidates = {cand};

  LinkDecision d =
      linker::disambiguate_author(mention("Jane Doe", {"The Exact Same Paper"}), stub);
  EXPECT_TRUE(d.linked);
  EXPECT_EQ(d.step, 1);
  ASSERT_EQ(stub.calls.size(), 1u);
  EXPECT_EQ(stub.calls[0], "candidates:Jane Doe");  // works never queried
}

TEST(DisambiguateAuthor, CatalogErrorBecomesErrorOutcome) {
  StubCatalog stub;
  stub.throw_on_candidates = true;
  LinkDecision d = linker::disambiguate_author(mention("Jane Doe", {"T"}), stub);
  EXPECT_FALSE(d.linked);
  EXPECT_EQ(d.reason, "catalog-error");
}

TEST(LinkAuthors, ThresholdMonotonicity) {
  // One work whose byline has names at staggered distances from the
  // mentions; raising min_sim must only shrink the linked set.
  StubCatalog stub;
  catalog::WorkHit work;
  work.work_iri = "https://e.org/w/1";
  work.title = "The Common Paper";
  work.authors = {{"https://e.org/a/1", "alpha beta gamma"},
                  {"https://e.org/a/2", "delta epsilon"},
                  {"https://e.org/a/3", "zeta"}};
  stub.works = {work};

  std::mt19937_64 rng(42);
  std::vector<AuthorMention> mentions;
  const std::string alphabet = "abcdefghij ";
  for (int i = 0; i < 200; ++i) {
    std::string name;
    std::uniform_int_distribution<std::size_t> len(3, 18);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    const std::size_t n = len(rng);
    for (std::size_t j = 0; j < n; ++j) name.push_back(alphabet[pick(rng)]);
    AuthorMention m = mention(name + std::to_string(i), {"The Common Paper"});
    mentions.push_back(std::move(m));
  }

  std::set<std::string> previous_linked;
  bool first = true;
  for (double threshold : {0.0, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    linker::LinkerConfig cfg;
    cfg.min_sim = threshold;
    cfg.workers = 2;
    std::set<std::string> linked;
    for (const LinkDecision& d : linker::link_authors(mentions, stub, cfg)) {
      if (d.linked) linked.insert(d.id);
    }
    if (!first) {
      // linked set at the higher threshold is a subset of the previous one
      for (const std::string& id : linked) {
        EXPECT_TRUE(previous_linked.count(id)) << "threshold " << threshold << " added " << id;
      }
      EXPECT_LE(linked.size(), previous_linked.size());
    }
    previous_linked = std::move(linked);
    first = false;
  }
}

TEST(LinkAuthors, OutcomePartitionIsExact) {
  // Scripted catalog: names starting with 'e' error out, names starting
  // with 'm' match in step 1, everything else falls through to no-match.
  class PartitionCatalog : public StubCatalog {
   public:
    std::vector<catalog::CatalogCandidate> candidates_by_name(const std::string& name) override {
      if (name[0] == 'e') throw kgforge::CatalogUnavailableError("stub");
      if (name[0] == 'm') {
        catalog::CatalogCandidate c;
        c.external_id = "https://e.org/a/" + name;
        c.display_name = name;
        c.work_titles = {"T"};
        return {c};
      }
      return {};
    }
  } cat;

  std::mt19937_64 rng(7);
  std::vector<AuthorMention> mentions;
  const char* starts = "emno";
  for (int i = 0; i < 100; ++i) {
    std::string name;
    name.push_back(starts[rng() % 4]);
    name += "-author-" + std::to_string(i);
    mentions.push_back(mention(name, {"T"}));
  }
  std::vector<LinkDecision> decisions = linker::link_authors(mentions, cat);
  std::size_t linked = 0, unlinked = 0, errored = 0;
  for (const LinkDecision& d : decisions) {
    if (d.linked) {
      ++linked;
    } else if (d.reason == "catalog-error") {
      ++errored;
    } else {
      ++unlinked;
    }
  }
  EXPECT_EQ(linked + unlinked + errored, mentions.size());
  EXPECT_GT(linked, 0u);
  EXPECT_GT(unlinked, 0u);
  EXPECT_GT(errored, 0u);
}

TEST(LinkAuthors, DeterministicAcrossWorkerCounts) {
  ingest::IngestReport report;
  std::ifstream in(std::string(KGFORGE_FIXTURE_DIR) + "/pwc-mini/papers-with-abstracts.json",
                   std::ios::binary);
  std::vector<ingest::EntityRecord> papers =
      ingest::read_dump(ingest::DumpFileKind::Papers, in, "papers", registry(), report);
  std::vector<AuthorMention> mentions = linker::extract_author_mentions(papers);
  ASSERT_GT(mentions.size(), 10u);

  linker::LinkerConfig one, eight;
  one.workers = 1;
  eight.workers = 8;
  std::vector<LinkDecision> a = linker::link_authors(mentions, fixture_catalog(), one);
  std::vector<LinkDecision> b = linker::link_authors(mentions, fixture_catalog(), eight);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].linked, b[i].linked);
    EXPECT_EQ(a[i].external_iri, b[i].external_iri);
    EXPECT_EQ(a[i].step, b[i].step);
    EXPECT_EQ(a[i].score, b[i].score);
    EXPECT_EQ(a[i].reason, b[i].reason);
  }
}

TEST(ExtractMentions, GroupsByNameAcrossPapers) {
  ingest::IngestReport report;
  std::ifstream in(std::string(KGFORGE_FIXTURE_DIR) + "/pwc-mini/papers-with-abstracts.json",
                   std::ios::binary);
  std::vector<ingest::EntityRecord> papers =
      ingest::read_dump(ingest::DumpFileKind::Papers, in, "papers", registry(), report);
  std::vector<AuthorMention> mentions = linker::extract_author_mentions(papers);

  const AuthorMention* sutskever = nullptr;
  for (const auto& m : mentions) {
    EXPECT_FALSE(m.name.empty());
    EXPECT_GE(m.paper_titles.size(), 1u);
    EXPECT_EQ(m.mention_id.size(), 16u);  // 64-bit hash in hex
    if (m.name == "Ilya Sutskever") sutskever = &m;
  }
  ASSERT_NE(sutskever, nullptr);
  EXPECT_EQ(sutskever->paper_titles.size(), 2u);  // AlexNet and seq2seq papers
  EXPECT_EQ(sutskever->paper_slugs.size(), 2u);

  // Sorted by name, and ids are stable across extractions.
  for (std::size_t i = 1; i < mentions.size(); ++i) {
    EXPECT_LT(mentions[i - 1].name, mentions[i].name);
  }
  std::vector<AuthorMention> again = linker::extract_author_mentions(papers);
  ASSERT_EQ(again.size(), mentions.size());
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    EXPECT_EQ(again[i].mention_id, mentions[i].mention_id);
  }
}

TEST(LinkSameAs, SevenOfTenPapersGivesRatioPointSeven) {
  ingest::IngestReport report;
  std::ifstream in(std::string(KGFORGE_FIXTURE_DIR) + "/pwc-mini/papers-with-abstracts.json",
                   std::ios::binary);
  std::vector<ingest::EntityRecord> papers =
      ingest::read_dump(ingest::DumpFileKind::Papers, in, "papers", registry(), report);
  papers.resize(10);  // the catalog covers 7 of the first 10

  linker::SameAsResult result =
      linker::link_sameas(linker::SameAsKind::Paper, papers, fixture_catalog(), minter());
  EXPECT_EQ(result.report.total, 10u);
  EXPECT_EQ(result.report.linked, 7u);
  EXPECT_EQ(result.report.unlinked, 3u);
  EXPECT_DOUBLE_EQ(result.report.ratio(), 0.70);
  EXPECT_EQ(result.triples.size(), 7u);
  for (const auto& t : result.triples) {
    EXPECT_EQ(t.predicate.value(), "http://www.w3.org/2002/07/owl#sameAs");
    EXPECT_EQ(t.subject.value().rfind("https://linkedpaperswithcode.com/paper/", 0), 0u);
    EXPECT_EQ(t.object.value().rfind("https://semopenalex.org/work/", 0), 0u);
  }
}

TEST(LinkSameAs, TwoHitsOnEveryVariantIsAmbiguous) {
  ingest::EntityRecord rec;
  rec.class_name = "Paper";
  rec.slug = "a-duplicated-title";
  rec.scalars = {{"title", "A Duplicated Title"}};
  linker::SameAsResult result =
      linker::link_sameas(linker::SameAsKind::Paper, {rec}, fixture_catalog(), minter());
  EXPECT_EQ(result.report.linked, 0u);
  ASSERT_EQ(result.decisions.size(), 1u);
  EXPECT_EQ(result.decisions[0].reason, "ambiguous");
}

TEST(LinkSameAs, DatasetLabelVerbatimInCatalog) {
  ingest::EntityRecord rec;
  rec.class_name = "Dataset";
  rec.slug = "imagenet";
  rec.scalars = {{"datasetName", "ImageNet"}};
  linker::SameAsResult result =
      linker::link_sameas(linker::SameAsKind::Dataset, {rec}, fixture_catalog(), minter());
  ASSERT_EQ(result.triples.size(), 1u);
  EXPECT_EQ(result.triples[0].to_ntriples(),
            "<https://linkedpaperswithcode.com/dataset/imagenet> "
            "<http://www.w3.org/2002/07/owl#sameAs> "
            "<https://www.wikidata.org/entity/Q17070956> .");
}

TEST(LinkSameAs, ConferenceByAcronym) {
  ingest::EntityRecord rec;
  rec.class_name = "Conference";
  rec.slug = "neurips-2017-12";
  rec.scalars = {{"acronym", "NeurIPS"}};
  linker::SameAsResult result =
      linker::link_sameas(linker::SameAsKind::Conference, {rec}, fixture_catalog(), minter());
  ASSERT_EQ(result.triples.size(), 1u);
  EXPECT_EQ(result.triples[0].object.value(), "https://dblp.org/db/conf/nips");
}

TEST(ApplyDecisions, LinkedAndUnlinkedMentionsOnOnePaper) {
  rdf::GraphBuffer graph;
  const std::string paper_iri = minter().mint("Paper", "solo-paper");
  graph.insert({rdf::Term::iri(paper_iri),
                rdf::Term::iri(std::string(rdf::iris::rdf_type)),
                rdf::Term::iri(registry().require_class("Paper").uri)});

  std::vector<AuthorMention> mentions;
  std::vector<LinkDecision> decisions;
  for (int i = 0; i < 5; ++i) {
    AuthorMention m;
    m.name = "Author Number " + std::to_string(i);
    m.mention_id = "m" + std::to_string(i);
    m.paper_titles = {"Solo Paper"};
    m.paper_slugs = {"solo-paper"};
    mentions.push_back(m);
    LinkDecision d;
    d.id = m.mention_id;
    if (i < 3) {
      d.linked = true;
      d.external_iri = "https://semopenalex.org/author/AX" + std::to_string(i);
      d.step = 1;
      d.score = 1.0;
    } else {
      d.reason = "no-match";
    }
    decisions.push_back(d);
  }

  // Without local author entities: exactly 3 link triples + 2 literals.
  linker::MutationSummary summary = linker::apply_link_decisions(
      mentions, decisions, graph, minter(), registry(), /*local_author_entities=*/false);
  EXPECT_EQ(summary.linked_applied, 3u);
  EXPECT_EQ(summary.unlinked_applied, 2u);
  EXPECT_EQ(summary.triples_added, 5u);
  EXPECT_EQ(graph.size(), 6u);  // type triple + 5

  // With local author entities each linked mention adds type + sameAs + link.
  rdf::GraphBuffer graph2;
  graph2.insert({rdf::Term::iri(paper_iri),
                 rdf::Term::iri(std::string(rdf::iris::rdf_type)),
                 rdf::Term::iri(registry().require_class("Paper").uri)});
  linker::MutationSummary s2 = linker::apply_link_decisions(
      mentions, decisions, graph2, minter(), registry(), /*local_author_entities=*/true);
  EXPECT_EQ(s2.linked_applied, 3u);
  EXPECT_EQ(s2.triples_added, 3u * 3 + 2u);
}

TEST(ApplyDecisions, EmptyDecisionListLeavesGraphUnchanged) {
  rdf::GraphBuffer graph;
  graph.insert({rdf::Term::iri("https://e.org/s"), rdf::Term::iri("https://e.org/p"),
                rdf::Term::literal("v")});
  linker::MutationSummary summary =
      linker::apply_link_decisions({}, {}, graph, minter(), registry());
  EXPECT_EQ(summary.triples_added, 0u);
  EXPECT_EQ(graph.size(), 1u);
}

TEST(ApplyDecisions, UnknownPaperThrows) {
  rdf::GraphBuffer graph;  // empty: the paper is missing
  AuthorMention m;
  m.name = "Someone";
  m.mention_id = "m0";
  m.paper_titles = {"T"};
  m.paper_slugs = {"not-in-graph"};
  LinkDecision d;
  d.id = "m0";
  d.reason = "no-match";
  EXPECT_THROW(
      linker::apply_link_decisions({m}, {d}, graph, minter(), registry()),
      kgforge::UnknownPaperError);
}

TEST(LinkReport, WritesJson) {
  linker::LinkReport report;
  report.papers.total = 10;
  report.papers.linked = 7;
  report.papers.unlinked = 3;
  std::ostringstream out;
  report.write_json(out);
  nlohmann::json doc = nlohmann::json::parse(out.str());
  EXPECT_DOUBLE_EQ(doc["papers"]["ratio"].get<double>(), 0.7);
  EXPECT_EQ(doc["authors"]["total"], 0);
}
