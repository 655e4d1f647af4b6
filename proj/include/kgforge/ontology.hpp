// Target schema registry: the 13 entity classes and 47 properties, the URI
// minting policy, and ontology/VoID triple emission.
//
// The class and property inventory is reconstructed from the published
// schema description and lives in this single file so it can be corrected
// against the published OWL file without touching any other code.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgforge/errors.hpp"
#include "kgforge/graph_stats.hpp"
#include "kgforge/rdf.hpp"
#include "kgforge/textnorm.hpp"
#include "kgforge/unicode.hpp"

namespace kgforge::ontology {

struct ClassDescriptor {
  std::string local_name;   // e.g. "Paper"
  std::string uri;          // absolute IRI under the ontology base
  std::string description;  // plain text
};

enum class PropertyKind { Object, Datatype };

struct PropertyDescriptor {
  std::string local_name;  // e.g. "authorName"
  std::string uri;
  PropertyKind kind;
  std::string domain_class;  // registered class local name
  std::string range;         // class local name (object) or datatype IRI (datatype)
};

struct UriPolicy {
  std::string base_namespace = "https://linkedpaperswithcode.com/";
  std::string ontology_namespace;  // defaults to base + "ontology/"
  std::map<std::string, std::string> class_segments;

  std::string ontology_base() const {
    return ontology_namespace.empty() ? base_namespace + "ontology/" : ontology_namespace;
  }

  void validate() const {
    if (base_namespace.empty() || base_namespace.back() != '/') {
      throw ConfigError("uri base namespace must end with '/'");
    }
    std::set<std::string> seen;
    for (const auto& [cls, seg] : class_segments) {
      if (seg.empty()) throw ConfigError("empty path segment for class " + cls);
      for (char c : seg) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
        if (!ok) throw ConfigError("path segment must be lowercase ASCII: " + seg);
      }
      if (!seen.insert(seg).second) throw ConfigError("duplicate path segment: " + seg);
    }
  }
};

// Lowercased, hyphen-separated identifier: NFC, runs of non-alphanumerics
// collapse to a single '-', trimmed. Empty result is the caller's error.
inline std::string slugify(std::string_view raw) {
  std::string folded = unicode::lowercase(unicode::nfc(raw));
  std::vector<char32_t> cps = unicode::decode_all(folded);
  std::string out;
  bool pending_sep = false;
  for (char32_t cp : cps) {
    const bool keep = !(cp & unicode::kInvalidByteFlag) &&
                      ((cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9') ||
                       (cp >= 0x80 && !unicode::is_combining_mark(cp) &&
                        !textnorm::detail::is_stripped_unicode_punct(cp)));
    if (keep) {
      if (pending_sep && !out.empty()) out.push_back('-');
      pending_sep = false;
      unicode::encode(cp, out);
    } else {
      pending_sep = true;
    }
  }
  return out;
}

// Percent-encodes every byte outside the URI-unreserved set.
inline std::string percent_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    const bool unreserved = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                            (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_' ||
                            c == '~';
    if (unreserved) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0x0F]);
    }
  }
  return out;
}

class Registry {
 public:
  Registry(std::vector<ClassDescriptor> classes, std::vector<PropertyDescriptor> properties,
           std::string ontology_base, std::size_t expected_classes = 13,
           std::size_t expected_properties = 47)
      : classes_(std::move(classes)), properties_(std::move(properties)) {
    if (classes_.size() != expected_classes) {
      throw RegistryError("expected " + std::to_string(expected_classes) + " classes, got " +
                          std::to_string(classes_.size()));
    }
    if (properties_.size() != expected_properties) {
      throw RegistryError("expected " + std::to_string(expected_properties) +
                          " properties, got " + std::to_string(properties_.size()));
    }
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      const auto& c = classes_[i];
      if (!rdf::is_valid_iri(c.uri) || c.uri.compare(0, ontology_base.size(), ontology_base) != 0) {
        throw RegistryError("class URI not under ontology base: " + c.uri);
      }
      if (!class_index_.emplace(c.local_name, i).second) {
        throw RegistryError("duplicate class name: " + c.local_name);
      }
    }
    for (std::size_t i = 0; i < properties_.size(); ++i) {
      const auto& p = properties_[i];
      if (!property_index_.emplace(p.local_name, i).second) {
        throw RegistryError("duplicate property name: " + p.local_name);
      }
      if (!class_index_.count(p.domain_class)) {
        throw RegistryError("property " + p.local_name + " has unknown domain " + p.domain_class);
      }
      if (p.kind == PropertyKind::Object) {
        if (!class_index_.count(p.range)) {
          throw RegistryError("object property " + p.local_name + " has unknown range class " +
                              p.range);
        }
      } else {
        if (!rdf::is_valid_iri(p.range)) {
          throw RegistryError("datatype property " + p.local_name + " has invalid range: " +
                              p.range);
        }
      }
    }
  }

  const std::vector<ClassDescriptor>& classes() const { return classes_; }
  const std::vector<PropertyDescriptor>& properties() const { return properties_; }

  const ClassDescriptor* find_class(const std::string& local_name) const {
    auto it = class_index_.find(local_name);
    return it == class_index_.end() ? nullptr : &classes_[it->second];
  }
  const ClassDescriptor& require_class(const std::string& local_name) const {
    const ClassDescriptor* c = find_class(local_name);
    if (!c) throw RegistryError("unknown class: " + local_name);
    return *c;
  }
  const PropertyDescriptor* find_property(const std::string& local_name) const {
    auto it = property_index_.find(local_name);
    return it == property_index_.end() ? nullptr : &properties_[it->second];
  }
  const PropertyDescriptor& require_property(const std::string& local_name) const {
    const PropertyDescriptor* p = find_property(local_name);
    if (!p) throw RegistryError("unknown property: " + local_name);
    return *p;
  }

 private:
  std::vector<ClassDescriptor> classes_;
  std::vector<PropertyDescriptor> properties_;
  std::unordered_map<std::string, std::size_t> class_index_;
  std::unordered_map<std::string, std::size_t> property_index_;
};

// Mints stable entity IRIs and guards against distinct inputs colliding on
// one IRI within a build.
class UriMinter {
 public:
  UriMinter(const Registry& registry, UriPolicy policy)
      : registry_(registry), policy_(std::move(policy)) {
    policy_.validate();
    for (const auto& c : registry_.classes()) {
      if (!policy_.class_segments.count(c.local_name)) {
        throw ConfigError("uri policy missing path segment for class " + c.local_name);
      }
    }
  }

  const UriPolicy& policy() const { return policy_; }

  std::string mint(const std::string& class_name, std::string_view slug) const {
    const std::string slugged = slugify(slug);
    if (slugged.empty()) throw EmptySlugError(std::string(slug));
    auto seg = policy_.class_segments.find(class_name);
    if (seg == policy_.class_segments.end()) {
      throw RegistryError("no path segment for class " + class_name);
    }
    std::string iri = policy_.base_namespace + seg->second + "/" + percent_encode(slugged);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto [it, fresh] = minted_.emplace(iri, std::make_pair(class_name, slugged));
      if (!fresh && (it->second.first != class_name || it->second.second != slugged)) {
        throw UriCollisionError(iri);
      }
    }
    return iri;
  }

 private:
  const Registry& registry_;
  UriPolicy policy_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, std::pair<std::string, std::string>> minted_;
};

namespace detail {

inline void add_class(std::vector<ClassDescriptor>& out, const std::string& base,
                      std::string name, std::string description) {
  out.push_back({name, base + name, std::move(description)});
}

inline void add_prop(std::vector<PropertyDescriptor>& out, const std::string& base,
                     std::string name, PropertyKind kind, std::string domain, std::string range) {
  out.push_back({name, base + name, kind, std::move(domain), std::move(range)});
}

}  // namespace detail

// The shipped schema. Class inventory covers every reported entity type plus
// the structural classes needed to flatten nested evaluation data.
inline Registry default_registry(const std::string& ontology_base =
                                     "https://linkedpaperswithcode.com/ontology/") {
  using detail::add_class;
  using detail::add_prop;
  const std::string& b = ontology_base;

  std::vector<ClassDescriptor> classes;
  add_class(classes, b, "Paper", "A machine learning publication.");
  add_class(classes, b, "Author", "A person credited on a paper.");
  add_class(classes, b, "Conference", "A publication venue.");
  add_class(classes, b, "Repository", "A source code repository linked to a paper.");
  add_class(classes, b, "Task", "A machine learning task.");
  add_class(classes, b, "Dataset", "A dataset used for training or evaluation.");
  add_class(classes, b, "Method", "A named technique or model component.");
  add_class(classes, b, "Model", "A concrete model evaluated on a leaderboard.");
  add_class(classes, b, "EvaluationTable", "A leaderboard for a task on a dataset.");
  add_class(classes, b, "EvaluationResult", "One row of an evaluation table.");
  add_class(classes, b, "Metric", "An evaluation metric.");
  add_class(classes, b, "Area", "A broad research area grouping tasks.");
  add_class(classes, b, "DatasetVariant", "A named variant or split of a dataset.");

  std::vector<PropertyDescriptor> props;
  const auto obj = PropertyKind::Object;
  const auto dat = PropertyKind::Datatype;
  const std::string xs_string(rdf::iris::xsd_string);
  const std::string xs_date(rdf::iris::xsd_date);
  const std::string xs_boolean(rdf::iris::xsd_boolean);
  const std::string xs_gyear(rdf::iris::xsd_gyear);
  const std::string xs_anyuri(rdf::iris::xsd_any_uri);

  // object properties (19)
  add_prop(props, b, "hasAuthor", obj, "Paper", "Author");
  add_prop(props, b, "hasTask", obj, "Paper", "Task");
  add_prop(props, b, "usesDataset", obj, "Paper", "Dataset");
  add_prop(props, b, "hasMethod", obj, "Paper", "Method");
  add_prop(props, b, "hasRepository", obj, "Paper", "Repository");
  add_prop(props, b, "hasOfficialRepository", obj, "Paper", "Repository");
  add_prop(props, b, "publishedIn", obj, "Paper", "Conference");
  add_prop(props, b, "evaluatesTask", obj, "EvaluationTable", "Task");
  add_prop(props, b, "onDataset", obj, "EvaluationTable", "Dataset");
  add_prop(props, b, "hasSubTable", obj, "EvaluationTable", "EvaluationTable");
  add_prop(props, b, "hasResult", obj, "EvaluationTable", "EvaluationResult");
  add_prop(props, b, "achievedBy", obj, "EvaluationResult", "Model");
  add_prop(props, b, "measuresMetric", obj, "EvaluationResult", "Metric");
  add_prop(props, b, "reportedIn", obj, "EvaluationResult", "Paper");
  add_prop(props, b, "hasArea", obj, "Task", "Area");
  add_prop(props, b, "hasVariant", obj, "Dataset", "DatasetVariant");
  add_prop(props, b, "introducedBy", obj, "Dataset", "Paper");
  add_prop(props, b, "introducedIn", obj, "Method", "Paper");
  add_prop(props, b, "usedForTask", obj, "Dataset", "Task");

  // datatype properties (28)
  add_prop(props, b, "title", dat, "Paper", xs_string);
  add_prop(props, b, "abstract", dat, "Paper", xs_string);
  add_prop(props, b, "arxivId", dat, "Paper", xs_string);
  add_prop(props, b, "date", dat, "Paper", xs_date);
  add_prop(props, b, "urlAbstract", dat, "Paper", xs_anyuri);
  add_prop(props, b, "urlPdf", dat, "Paper", xs_anyuri);
  add_prop(props, b, "authorName", dat, "Paper", xs_string);
  add_prop(props, b, "repositoryUrl", dat, "Repository", xs_anyuri);
  add_prop(props, b, "isOfficial", dat, "Repository", xs_boolean);
  add_prop(props, b, "framework", dat, "Repository", xs_string);
  add_prop(props, b, "taskName", dat, "Task", xs_string);
  add_prop(props, b, "taskDescription", dat, "Task", xs_string);
  add_prop(props, b, "datasetName", dat, "Dataset", xs_string);
  add_prop(props, b, "datasetFullName", dat, "Dataset", xs_string);
  add_prop(props, b, "datasetDescription", dat, "Dataset", xs_string);
  add_prop(props, b, "homepage", dat, "Dataset", xs_anyuri);
  add_prop(props, b, "introducedDate", dat, "Dataset", xs_date);
  add_prop(props, b, "methodName", dat, "Method", xs_string);
  add_prop(props, b, "methodFullName", dat, "Method", xs_string);
  add_prop(props, b, "methodDescription", dat, "Method", xs_string);
  add_prop(props, b, "introducedYear", dat, "Method", xs_gyear);
  add_prop(props, b, "sourceUrl", dat, "Method", xs_anyuri);
  add_prop(props, b, "modelName", dat, "Model", xs_string);
  add_prop(props, b, "metricName", dat, "Metric", xs_string);
  add_prop(props, b, "metricValue", dat, "EvaluationResult", xs_string);
  add_prop(props, b, "conferenceName", dat, "Conference", xs_string);
  add_prop(props, b, "acronym", dat, "Conference", xs_string);
  add_prop(props, b, "areaName", dat, "Area", xs_string);

  return Registry(std::move(classes), std::move(props), ontology_base);
}

inline UriPolicy default_policy(const std::string& base = "https://linkedpaperswithcode.com/") {
  UriPolicy policy;
  policy.base_namespace = base;
  policy.class_segments = {
      {"Paper", "paper"},
      {"Author", "author"},
      {"Conference", "conference"},
      {"Repository", "repository"},
      {"Task", "task"},
      {"Dataset", "dataset"},
      {"Method", "method"},
      {"Model", "model"},
      {"EvaluationTable", "evaluation-table"},
      {"EvaluationResult", "evaluation-result"},
      {"Metric", "metric"},
      {"Area", "area"},
      {"DatasetVariant", "dataset-variant"},
  };
  policy.validate();
  return policy;
}

// One class-declaration triple per class, declaration + domain + range per
// property: 13 + 3*47 = 154 statements for the shipped registry.
inline std::vector<rdf::Triple> emit_ontology_triples(const Registry& registry) {
  using rdf::Term;
  std::vector<rdf::Triple> out;
  out.reserve(registry.classes().size() + 3 * registry.properties().size());
  const Term type = Term::iri(std::string(rdf::iris::rdf_type));
  for (const auto& c : registry.classes()) {
    out.emplace_back(Term::iri(c.uri), type, Term::iri(std::string(rdf::iris::owl_class)));
  }
  for (const auto& p : registry.properties()) {
    const Term prop = Term::iri(p.uri);
    const bool object = p.kind == PropertyKind::Object;
    out.emplace_back(prop, type,
                     Term::iri(std::string(object ? rdf::iris::owl_object_property
                                                  : rdf::iris::owl_datatype_property)));
    out.emplace_back(prop, Term::iri(std::string(rdf::iris::rdfs_domain)),
                     Term::iri(registry.require_class(p.domain_class).uri));
    const std::string range_iri =
        object ? registry.require_class(p.range).uri : p.range;
    out.emplace_back(prop, Term::iri(std::string(rdf::iris::rdfs_range)), Term::iri(range_iri));
  }
  return out;
}

inline const char* kLicenseIri = "https://creativecommons.org/licenses/by-sa/4.0/";

// VoID dataset description: size, license, per-class partitions, and one
// linkset per (external target, predicate) pair that has links.
inline std::vector<rdf::Triple> emit_void(const stats::GraphStats& graph_stats,
                                          const std::string& dump_date, const UriPolicy& policy,
                                          const Registry& registry) {
  using rdf::Term;
  std::vector<rdf::Triple> out;
  const std::string base = policy.base_namespace;
  const Term dataset = Term::iri(base + "void/lpwc");
  const Term type = Term::iri(std::string(rdf::iris::rdf_type));

  out.emplace_back(dataset, type, Term::iri(std::string(rdf::iris::void_dataset)));
  out.emplace_back(dataset, Term::iri(std::string(rdf::iris::void_triples)),
                   Term::literal(std::to_string(graph_stats.triple_count),
                                 std::string(rdf::iris::xsd_integer)));
  out.emplace_back(dataset, Term::iri(std::string(rdf::iris::dcterms_license)),
                   Term::iri(kLicenseIri));
  if (!dump_date.empty()) {
    out.emplace_back(dataset, Term::iri(std::string(rdf::iris::dcterms_modified)),
                     Term::literal(dump_date, std::string(rdf::iris::xsd_date)));
  }
  for (const auto& [class_name, count] : graph_stats.per_class) {
    if (count == 0) continue;
    const ClassDescriptor* cls = registry.find_class(class_name);
    if (!cls) continue;
    auto seg = policy.class_segments.find(class_name);
    const std::string seg_name =
        seg == policy.class_segments.end() ? slugify(class_name) : seg->second;
    const Term partition = Term::iri(base + "void/partition/" + seg_name);
    out.emplace_back(dataset, Term::iri(std::string(rdf::iris::void_class_partition)), partition);
    out.emplace_back(partition, Term::iri(std::string(rdf::iris::void_class)),
                     Term::iri(cls->uri));
    out.emplace_back(partition, Term::iri(std::string(rdf::iris::void_entities)),
                     Term::literal(std::to_string(count), std::string(rdf::iris::xsd_integer)));
  }
  for (const auto& ls : graph_stats.linksets) {
    if (ls.count == 0) continue;
    std::string pred_slug = slugify(ls.predicate_iri.substr(ls.predicate_iri.find_last_of("/#") + 1));
    const Term linkset = Term::iri(base + "void/linkset/" + ls.target_name + "-" + pred_slug);
    out.emplace_back(linkset, type, Term::iri(std::string(rdf::iris::void_linkset)));
    out.emplace_back(linkset, Term::iri(std::string(rdf::iris::void_subjects_target)), dataset);
    out.emplace_back(linkset, Term::iri(std::string(rdf::iris::void_objects_target)),
                     Term::iri(ls.target_dataset_iri));
    out.emplace_back(linkset, Term::iri(std::string(rdf::iris::void_link_predicate)),
                     Term::iri(ls.predicate_iri));
    out.emplace_back(linkset, Term::iri(std::string(rdf::iris::void_triples)),
                     Term::literal(std::to_string(ls.count), std::string(rdf::iris::xsd_integer)));
  }
  return out;
}

}  // namespace kgforge::ontology
