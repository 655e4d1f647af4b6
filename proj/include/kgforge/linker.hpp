// Entity linking against an external catalog: the two-step author
// disambiguation (exact name + title substring, then title-variant search
// with fuzzy name similarity), owl:sameAs creation for papers, conferences,
// and datasets, and the application of link decisions to a graph.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgforge/catalog.hpp"
#include "kgforge/errors.hpp"
#include "kgforge/ingest.hpp"
#include "kgforge/ontology.hpp"
#include "kgforge/rdf.hpp"
#include "kgforge/textnorm.hpp"

namespace kgforge::linker {

// One author name as it appears across the corpus, with the titles (and
// slugs) of the papers that mention it. The id is a stable hash of the name
// so decisions can be keyed independently of processing order.
struct AuthorMention {
  std::string mention_id;
  std::string name;
  std::vector<std::string> paper_titles;
  std::vector<std::string> paper_slugs;
};

struct LinkDecision {
  std::string id;            // mention id, or record slug for sameAs linking
  bool linked = false;
  std::string external_iri;  // set when linked
  int step = 0;              // 1 or 2 for author links, 0 otherwise
  double score = 0.0;        // 1.0 for step-1 links
  std::string reason;        // "no-match" | "ambiguous" | "catalog-error" when unlinked
};

struct LinkerConfig {
  double min_sim = 0.90;             // step-2 similarity threshold
  bool case_sensitive_names = false; // step-1 name comparison
  int workers = 4;
};

namespace detail {

inline std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[15 - i] = digits[(h >> (i * 4)) & 0xF];
  }
  return std::string(buf, 16);
}

inline bool names_equal(const std::string& a, const std::string& b, bool case_sensitive) {
  if (case_sensitive) return unicode::nfc(a) == unicode::nfc(b);
  return catalog::detail::fold_name(a) == catalog::detail::fold_name(b);
}

inline bool title_substring_match(const std::string& normalized_ours,
                                  const std::string& normalized_theirs) {
  if (normalized_ours.empty() || normalized_theirs.empty()) return false;
  return normalized_theirs.find(normalized_ours) != std::string::npos ||
         normalized_ours.find(normalized_theirs) != std::string::npos;
}

}  // namespace detail

// Groups the raw author-name strings of the paper records into mentions,
// one per distinct name, sorted by name for determinism.
inline std::vector<AuthorMention> extract_author_mentions(
    const std::vector<ingest::EntityRecord>& papers) {
  std::map<std::string, AuthorMention> by_name;
  for (const auto& paper : papers) {
    if (paper.class_name != "Paper") continue;
    std::string title;
    for (const auto& [prop, value] : paper.scalars) {
      if (prop == "title") title = value;
    }
    for (const std::string& name : paper.author_names) {
      if (name.empty()) continue;
      AuthorMention& m = by_name[name];
      if (m.name.empty()) {
        m.name = name;
        m.mention_id = detail::fnv1a_hex(name);
      }
      if (!title.empty()) m.paper_titles.push_back(title);
      m.paper_slugs.push_back(paper.slug);
    }
  }
  std::vector<AuthorMention> out;
  out.reserve(by_name.size());
  for (auto& [name, m] : by_name) {
    if (!m.paper_titles.empty()) out.push_back(std::move(m));
  }
  return out;
}

// The two-step disambiguation for one mention.
//
// Step 1: candidates with the exact same name (case folding per config) are
// matched by title evidence: a candidate qualifies when one of its work
// titles and one of the mention's paper titles are substrings of each other
// after normalization. Ties break by most matching work titles, then
// smallest IRI. A step-1 link always has score 1.0.
//
// Step 2: each title variant of each mention title is searched as a work;
// the best-scoring byline author with fuzzy similarity >= min_sim wins. Ties
// break by most matched works, then smallest IRI.
inline LinkDecision disambiguate_author(const AuthorMention& mention,
                                        catalog::CatalogClient& catalog,
                                        const LinkerConfig& cfg = {}) {
  LinkDecision decision;
  decision.id = mention.mention_id;

  std::vector<std::string> our_titles;
  our_titles.reserve(mention.paper_titles.size());
  for (const auto& t : mention.paper_titles) {
    our_titles.push_back(textnorm::normalize(t).value);
  }

  try {
    // ---- step 1
    std::string best_iri;
    std::size_t best_matches = 0;
    for (const catalog::CatalogCandidate& cand :
         catalog.candidates_by_name(mention.name)) {
      if (!detail::names_equal(cand.display_name, mention.name, cfg.case_sensitive_names)) {
        continue;
      }
      std::size_t matches = 0;
      for (const std::string& work_title : cand.work_titles) {
        const std::string theirs = textnorm::normalize(work_title).value;
        for (const std::string& ours : our_titles) {
          if (detail::title_substring_match(ours, theirs)) {
            ++matches;
            break;  // each work title counts once
          }
        }
      }
      if (matches == 0) continue;
      if (matches > best_matches ||
          (matches == best_matches && cand.external_id < best_iri)) {
        best_matches = matches;
        best_iri = cand.external_id;
      }
    }
    if (best_matches > 0) {
      decision.linked = true;
      decision.external_iri = best_iri;
      decision.step = 1;
      decision.score = 1.0;
      return decision;
    }

    // ---- step 2
    const std::string our_name = textnorm::normalize(mention.name).value;
    struct Tally {
      double best_sim = 0.0;
      std::size_t works = 0;
    };
    std::map<std::string, Tally> by_author;
    std::set<std::string> queried;
    for (const std::string& title : mention.paper_titles) {
      for (const std::string& variant : textnorm::title_variants(title)) {
        if (!queried.insert(variant).second) continue;
        for (const catalog::WorkHit& work : catalog.works_by_title_variant(variant)) {
          std::set<std::string> seen_in_work;
          for (const catalog::WorkAuthor& author : work.authors) {
            if (author.iri.empty()) continue;
            const double sim =
                textnorm::fuzzy_similarity(our_name, textnorm::normalize(author.name).value);
            Tally& t = by_author[author.iri];
            t.best_sim = std::max(t.best_sim, sim);
            if (seen_in_work.insert(author.iri).second) ++t.works;
          }
        }
      }
    }
    std::string best_author;
    Tally best;
    for (const auto& [iri, tally] : by_author) {
      if (tally.best_sim < cfg.min_sim) continue;
      const bool better = tally.best_sim > best.best_sim ||
                          (tally.best_sim == best.best_sim && tally.works > best.works) ||
                          (tally.best_sim == best.best_sim && tally.works == best.works &&
                           (best_author.empty() || iri < best_author));
      if (better) {
        best = tally;
        best_author = iri;
      }
    }
    if (!best_author.empty()) {
      decision.linked = true;
      decision.external_iri = best_author;
      decision.step = 2;
      decision.score = best.best_sim;
      return decision;
    }
    decision.reason = "no-match";
  } catch (const CatalogUnavailableError&) {
    decision.reason = "catalog-error";
  }
  return decision;
}

// Runs disambiguation over a worker pool. Decisions land at the index of
// their mention, so the result is independent of worker count and timing.
inline std::vector<LinkDecision> link_authors(const std::vector<AuthorMention>& mentions,
                                              catalog::CatalogClient& catalog,
                                              const LinkerConfig& cfg = {}) {
  std::vector<LinkDecision> decisions(mentions.size());
  const int workers = std::max(1, cfg.workers);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < mentions.size(); i = next.fetch_add(1)) {
      decisions[i] = disambiguate_author(mentions[i], catalog, cfg);
    }
  };
  if (workers == 1 || mentions.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return decisions;
}

// ---------------------------------------------------------------------------
// sameAs linking for papers, conferences, datasets
// ---------------------------------------------------------------------------

enum class SameAsKind { Paper, Conference, Dataset };

struct KindReport {
  std::size_t total = 0;
  std::size_t linked = 0;
  std::size_t unlinked = 0;
  std::size_t errored = 0;
  double ratio() const { return total == 0 ? 0.0 : static_cast<double>(linked) / total; }
};

struct LinkReport {
  KindReport authors;
  KindReport papers;
  KindReport conferences;
  KindReport datasets;

  void write_json(std::ostream& out) const {
    nlohmann::json doc;
    auto fill = [](const KindReport& r) {
      nlohmann::json j;
      j["total"] = r.total;
      j["linked"] = r.linked;
      j["unlinked"] = r.unlinked;
      j["errored"] = r.errored;
      j["ratio"] = r.ratio();
      return j;
    };
    doc["authors"] = fill(authors);
    doc["papers"] = fill(papers);
    doc["conferences"] = fill(conferences);
    doc["datasets"] = fill(datasets);
    out << doc.dump(2) << '\n';
    if (!out) throw SinkWriteError("link report stream");
  }
};

struct SameAsResult {
  std::vector<rdf::Triple> triples;
  std::vector<LinkDecision> decisions;
  KindReport report;
};

namespace detail {

inline std::string scalar_or(const ingest::EntityRecord& rec, const char* prop,
                             const std::string& fallback) {
  for (const auto& [k, v] : rec.scalars) {
    if (k == prop) return v;
  }
  return fallback;
}

}  // namespace detail

// Links records of one kind to their external counterparts:
//   papers      — first title variant with exactly one work hit wins;
//                 any multi-hit variant without a unique one is "ambiguous"
//   conferences — name + acronym lookup, unique hit required
//   datasets    — exact normalized label lookup, unique hit required
inline SameAsResult link_sameas(SameAsKind kind,
                                const std::vector<ingest::EntityRecord>& records,
                                catalog::CatalogClient& catalog,
                                const ontology::UriMinter& minter) {
  SameAsResult result;
  const rdf::Term same_as = rdf::Term::iri(std::string(rdf::iris::owl_same_as));

  for (const ingest::EntityRecord& rec : records) {
    LinkDecision decision;
    decision.id = rec.slug;
    ++result.report.total;
    std::string local_class;
    try {
      std::string external;
      std::string failure = "no-match";
      if (kind == SameAsKind::Paper) {
        local_class = "Paper";
        const std::string title = detail::scalar_or(rec, "title", "");
        if (!title.empty()) {
          for (const std::string& variant : textnorm::title_variants(title)) {
            std::vector<catalog::WorkHit> hits = catalog.works_by_title_variant(variant);
            if (hits.size() == 1) {
              external = hits[0].work_iri;
              break;
            }
            if (hits.size() > 1) failure = "ambiguous";
          }
        }
      } else if (kind == SameAsKind::Conference) {
        local_class = "Conference";
        const std::string name = detail::scalar_or(rec, "conferenceName", rec.slug);
        const std::string acronym = detail::scalar_or(rec, "acronym", "");
        std::vector<std::string> hits = catalog.conference_lookup(name, acronym);
        if (hits.size() == 1) external = hits[0];
        if (hits.size() > 1) failure = "ambiguous";
      } else {
        local_class = "Dataset";
        const std::string label = detail::scalar_or(rec, "datasetName", rec.slug);
        std::vector<std::string> hits = catalog.dataset_lookup(label);
        if (hits.size() == 1) external = hits[0];
        if (hits.size() > 1) failure = "ambiguous";
      }

      if (!external.empty()) {
        decision.linked = true;
        decision.external_iri = external;
        decision.score = 1.0;
        ++result.report.linked;
        result.triples.emplace_back(rdf::Term::iri(minter.mint(local_class, rec.slug)),
                                    same_as, rdf::Term::iri(external));
      } else {
        decision.reason = failure;
        ++result.report.unlinked;
      }
    } catch (const CatalogUnavailableError&) {
      decision.reason = "catalog-error";
      ++result.report.errored;
    }
    result.decisions.push_back(std::move(decision));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Applying decisions to the graph
// ---------------------------------------------------------------------------

struct MutationSummary {
  std::size_t linked_applied = 0;
  std::size_t unlinked_applied = 0;
  std::size_t triples_added = 0;
};

// Writes author link decisions into the graph. Linked mentions become
// hasAuthor links on each of the mention's papers; unlinked mentions fall
// back to authorName literals. With local author entities enabled, the link
// goes through a minted lpwc author that carries the owl:sameAs statement.
inline MutationSummary apply_link_decisions(const std::vector<AuthorMention>& mentions,
                                            const std::vector<LinkDecision>& decisions,
                                            rdf::GraphBuffer& graph,
                                            const ontology::UriMinter& minter,
                                            const ontology::Registry& registry,
                                            bool local_author_entities = true) {
  std::map<std::string, const LinkDecision*> by_id;
  for (const LinkDecision& d : decisions) by_id.emplace(d.id, &d);

  const rdf::Term has_author =
      rdf::Term::iri(registry.require_property("hasAuthor").uri);
  const rdf::Term author_name =
      rdf::Term::iri(registry.require_property("authorName").uri);
  const rdf::Term same_as = rdf::Term::iri(std::string(rdf::iris::owl_same_as));
  const rdf::Term rdf_type = rdf::Term::iri(std::string(rdf::iris::rdf_type));
  const rdf::Term author_class = rdf::Term::iri(registry.require_class("Author").uri);

  MutationSummary summary;
  for (const AuthorMention& mention : mentions) {
    auto it = by_id.find(mention.mention_id);
    if (it == by_id.end()) continue;  // no decision for this mention
    const LinkDecision& decision = *it->second;

    std::vector<std::string> paper_iris;
    for (const std::string& slug : mention.paper_slugs) {
      std::string iri = minter.mint("Paper", slug);
      if (!graph.has_subject(iri)) throw UnknownPaperError(iri);
      paper_iris.push_back(std::move(iri));
    }

    if (decision.linked) {
      ++summary.linked_applied;
      rdf::Term target = rdf::Term::iri(decision.external_iri);
      if (local_author_entities) {
        rdf::Term local = rdf::Term::iri(minter.mint("Author", mention.name));
        if (graph.insert({local, rdf_type, author_class})) ++summary.triples_added;
        if (graph.insert({local, same_as, rdf::Term::iri(decision.external_iri)})) {
          ++summary.triples_added;
        }
        target = local;
      }
      for (const std::string& paper : paper_iris) {
        if (graph.insert({rdf::Term::iri(paper), has_author, target})) {
          ++summary.triples_added;
        }
      }
    } else {
      ++summary.unlinked_applied;
      for (const std::string& paper : paper_iris) {
        if (graph.insert({rdf::Term::iri(paper), author_name,
                          rdf::Term::literal(mention.name)})) {
          ++summary.triples_added;
        }
      }
    }
  }
  return summary;
}

}  // namespace kgforge::linker
