// Graph statistics: per-class instance counts, papers-with-evaluations,
// external linkset sizes, and per-conference metric histograms. Everything
// here is a pure read over a frozen GraphBuffer; computing twice over the
// same triple set gives identical results regardless of insertion order.
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgforge/graph_stats.hpp"
#include "kgforge/ontology.hpp"
#include "kgforge/rdf.hpp"
#include "kgforge/unicode.hpp"

namespace kgforge::stats {

// External catalogs we mint owl:sameAs links into. An object IRI belongs to
// a target when it starts with the prefix.
struct ExternalTarget {
  std::string name;         // short name used in linkset IRIs ("semopenalex")
  std::string iri_prefix;   // e.g. "https://semopenalex.org/"
  std::string dataset_iri;  // the VoID target dataset
};

inline const std::vector<ExternalTarget>& default_targets() {
  static const std::vector<ExternalTarget> targets = {
      {"semopenalex", "https://semopenalex.org/", "https://semopenalex.org/"},
      {"wikidata", "https://www.wikidata.org/entity/", "https://www.wikidata.org/"},
      {"dblp", "https://dblp.org/", "https://dblp.org/"},
  };
  return targets;
}

namespace detail {

inline std::string iri_tail(const std::string& iri) {
  const std::size_t slash = iri.find_last_of('/');
  return slash == std::string::npos ? iri : iri.substr(slash + 1);
}

}  // namespace detail

// Per-class counts come from distinct typed subjects; linkset counts from
// object-IRI triples pointing into a known external catalog.
inline GraphStats count_entities(
    const rdf::GraphBuffer& graph, const ontology::Registry& registry,
    const std::vector<ExternalTarget>& targets = default_targets()) {
  GraphStats out;
  out.triple_count = graph.size();

  for (const ontology::ClassDescriptor& cls : registry.classes()) {
    out.per_class[cls.local_name] = graph.subjects_of_class(cls.uri).size();
  }

  const std::string reported_in = registry.require_property("reportedIn").uri;
  std::unordered_set<std::string> evaluated_papers;
  // (target index, predicate) -> count of links into that catalog
  std::map<std::pair<std::size_t, std::string>, std::size_t> links;
  for (const rdf::Triple& t : graph) {
    if (t.predicate.value() == reported_in && t.object.is_iri()) {
      evaluated_papers.insert(t.object.value());
    }
    if (!t.object.is_iri()) continue;
    const std::string& obj = t.object.value();
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (obj.compare(0, targets[i].iri_prefix.size(), targets[i].iri_prefix) == 0) {
        ++links[{i, t.predicate.value()}];
        break;
      }
    }
  }
  out.papers_with_evaluations = evaluated_papers.size();
  for (const auto& [key, count] : links) {
    const ExternalTarget& target = targets[key.first];
    out.linksets.push_back({target.name, target.dataset_iri, key.second, count});
  }
  return out;
}

// Resolves a user-supplied conference name against Conference entities by
// IRI tail, acronym, or full name (all case-insensitively).
inline std::string resolve_conference(const rdf::GraphBuffer& graph,
                                      const ontology::Registry& registry,
                                      const std::string& requested) {
  const std::string folded = unicode::lowercase(unicode::nfc(requested));
  const std::string conference_class = registry.require_class("Conference").uri;
  const std::string name_prop = registry.require_property("conferenceName").uri;
  const std::string acronym_prop = registry.require_property("acronym").uri;

  const std::set<std::string>& conferences = graph.subjects_of_class(conference_class);
  for (const std::string& iri : conferences) {
    if (unicode::lowercase(detail::iri_tail(iri)) == folded) return iri;
  }
  std::string hit;
  for (const rdf::Triple& t : graph) {
    const std::string& p = t.predicate.value();
    if (p != name_prop && p != acronym_prop) continue;
    if (!conferences.count(t.subject.value())) continue;
    if (unicode::lowercase(unicode::nfc(t.object.value())) == folded) {
      if (!hit.empty() && hit != t.subject.value()) return "";  // ambiguous
      hit = t.subject.value();
    }
  }
  return hit;
}

// Histogram of metric names over evaluation results of papers published at
// each requested conference. One (paper, metric) pair counts once no matter
// how many result rows repeat it.
inline std::vector<MetricHistogram> metric_distribution(
    const rdf::GraphBuffer& graph, const ontology::Registry& registry,
    const std::vector<std::string>& conferences) {
  const std::string published_in = registry.require_property("publishedIn").uri;
  const std::string reported_in = registry.require_property("reportedIn").uri;
  const std::string measures = registry.require_property("measuresMetric").uri;
  const std::string metric_name_prop = registry.require_property("metricName").uri;

  std::unordered_map<std::string, std::string> paper_conference;
  std::unordered_map<std::string, std::vector<std::string>> result_papers;
  std::unordered_map<std::string, std::vector<std::string>> result_metrics;
  std::unordered_map<std::string, std::string> metric_names;
  for (const rdf::Triple& t : graph) {
    const std::string& p = t.predicate.value();
    if (p == published_in && t.object.is_iri()) {
      paper_conference[t.subject.value()] = t.object.value();
    } else if (p == reported_in && t.object.is_iri()) {
      result_papers[t.subject.value()].push_back(t.object.value());
    } else if (p == measures && t.object.is_iri()) {
      result_metrics[t.subject.value()].push_back(t.object.value());
    } else if (p == metric_name_prop && !t.object.is_iri()) {
      metric_names[t.subject.value()] = t.object.value();
    }
  }

  std::vector<MetricHistogram> out;
  for (const std::string& requested : conferences) {
    MetricHistogram h;
    h.conference = requested;
    const std::string conference_iri = resolve_conference(graph, registry, requested);
    if (conference_iri.empty()) {
      h.found = false;
      out.push_back(std::move(h));
      continue;
    }
    std::set<std::pair<std::string, std::string>> incidences;  // (paper, metric)
    for (const auto& [result, metrics] : result_metrics) {
      auto papers = result_papers.find(result);
      if (papers == result_papers.end()) continue;
      for (const std::string& paper : papers->second) {
        auto conf = paper_conference.find(paper);
        if (conf == paper_conference.end() || conf->second != conference_iri) continue;
        for (const std::string& metric : metrics) incidences.emplace(paper, metric);
      }
    }
    std::map<std::string, std::size_t> bins;
    for (const auto& [paper, metric] : incidences) {
      auto named = metric_names.find(metric);
      ++bins[named == metric_names.end() ? detail::iri_tail(metric) : named->second];
    }
    h.bins.assign(bins.begin(), bins.end());
    std::sort(h.bins.begin(), h.bins.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    out.push_back(std::move(h));
  }
  return out;
}

namespace detail {

inline std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += "\"\"";
    else quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

}  // namespace detail

// One row per class, then the papers-with-evaluations roll-up.
inline void write_entities_csv(const GraphStats& stats, std::ostream& out) {
  out << "class,instances\n";
  for (const auto& [name, count] : stats.per_class) {
    out << detail::csv_field(name) << "," << count << "\n";
  }
  out << "PaperWithEvaluations," << stats.papers_with_evaluations << "\n";
}

// One row per (conference, metric); unresolved conferences keep a row with an
// empty metric column so the omission is visible downstream.
inline void write_metrics_csv(const std::vector<MetricHistogram>& histograms,
                              std::ostream& out) {
  out << "conference,metric,count\n";
  for (const MetricHistogram& h : histograms) {
    if (!h.found) {
      out << detail::csv_field(h.conference) << ",,unknown\n";
      continue;
    }
    for (const auto& [metric, count] : h.bins) {
      out << detail::csv_field(h.conference) << "," << detail::csv_field(metric) << ","
          << count << "\n";
    }
  }
}

inline nlohmann::json stats_to_json(const GraphStats& stats,
                                    const std::vector<MetricHistogram>& histograms) {
  nlohmann::json doc;
  doc["triples"] = stats.triple_count;
  doc["entities"] = nlohmann::json::object();
  for (const auto& [name, count] : stats.per_class) doc["entities"][name] = count;
  doc["papers_with_evaluations"] = stats.papers_with_evaluations;
  doc["linksets"] = nlohmann::json::array();
  for (const LinksetStat& ls : stats.linksets) {
    doc["linksets"].push_back({{"target", ls.target_name},
                               {"target_dataset", ls.target_dataset_iri},
                               {"predicate", ls.predicate_iri},
                               {"count", ls.count}});
  }
  doc["metrics"] = nlohmann::json::array();
  for (const MetricHistogram& h : histograms) {
    nlohmann::json entry{{"conference", h.conference}, {"found", h.found}};
    entry["bins"] = nlohmann::json::array();
    for (const auto& [metric, count] : h.bins) {
      entry["bins"].push_back({{"metric", metric}, {"count", count}});
    }
    doc["metrics"].push_back(std::move(entry));
  }
  return doc;
}

}  // namespace kgforge::stats
