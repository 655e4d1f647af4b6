// Streaming readers for the upstream JSON dump files. Each reader walks the
// top-level array with a SAX handler that materializes one element at a time,
// so peak memory tracks record size rather than file size. Upstream field
// names map to registry properties through one declarative table per file
// kind; anything else lands in the warning report instead of aborting the
// run.
#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgforge/errors.hpp"
#include "kgforge/gzipio.hpp"
#include "kgforge/ontology.hpp"

namespace kgforge::ingest {

using json = nlohmann::json;

enum class DumpFileKind { Papers, CodeLinks, EvaluationTables, Methods, Datasets };

// Case-insensitive match on the upstream dump file names; a trailing ".gz"
// is ignored. Anything else is not a dump file.
inline std::optional<DumpFileKind> kind_for_filename(std::string_view path) {
  std::string name(path);
  std::size_t slash = name.find_last_of("/\\");
  if (slash != std::string::npos) name.erase(0, slash + 1);
  for (char& c : name) c = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  if (name.size() > 3 && name.compare(name.size() - 3, 3, ".gz") == 0) {
    name.erase(name.size() - 3);
  }
  if (name == "papers-with-abstracts.json") return DumpFileKind::Papers;
  if (name == "links-between-papers-and-code.json") return DumpFileKind::CodeLinks;
  if (name == "evaluation-tables.json") return DumpFileKind::EvaluationTables;
  if (name == "methods.json") return DumpFileKind::Methods;
  if (name == "datasets.json") return DumpFileKind::Datasets;
  return std::nullopt;
}

inline const char* class_for_kind(DumpFileKind kind) {
  switch (kind) {
    case DumpFileKind::Papers: return "Paper";
    case DumpFileKind::CodeLinks: return "Repository";
    case DumpFileKind::EvaluationTables: return "EvaluationTable";
    case DumpFileKind::Methods: return "Method";
    case DumpFileKind::Datasets: return "Dataset";
  }
  return "";
}

// A reference to another record, by class and slug. The raw upstream name
// travels along so that referenced-but-never-described entities can still be
// labelled when they are materialized.
struct LinkRef {
  std::string class_name;
  std::string slug;
  std::string raw_name;
};

// One validated record from a dump file, expressed entirely in registry
// vocabulary. Scalars and links are ordered lists (not maps) because a
// property may legitimately repeat, e.g. one evaluation row reporting
// several metric values.
struct EntityRecord {
  std::string class_name;
  std::string slug;
  std::vector<std::pair<std::string, std::string>> scalars;  // property -> lexical value
  std::vector<std::pair<std::string, LinkRef>> links;        // property -> target
  std::vector<std::string> author_names;                     // papers only
  std::string join_paper_slug;                               // code links only
};

// ---------------------------------------------------------------------------
// Warning report
// ---------------------------------------------------------------------------

struct ReportEntry {
  std::string file;
  std::string kind;    // "unknown_key" | "skipped_record" | "dangling_link" | "summary"
  std::string detail;  // key name, reason, or link description
  std::size_t index = 0;
  std::size_t count = 1;
};

// Collects per-file warnings during a run and writes them as JSON lines.
// Unknown keys are deduplicated per (file, key) with a running count so a
// million records with one odd field produce one line, not a million.
class IngestReport {
 public:
  void unknown_key(const std::string& file, const std::string& key) {
    auto [it, fresh] = unknown_index_.emplace(file + "\x1f" + key, entries_.size());
    if (fresh) {
      entries_.push_back({file, "unknown_key", key, 0, 1});
    } else {
      ++entries_[it->second].count;
    }
  }

  void skipped_record(const std::string& file, std::size_t index, const std::string& reason) {
    entries_.push_back({file, "skipped_record", reason, index, 1});
  }

  void dangling_link(const std::string& file, const std::string& repo_slug,
                     const std::string& paper_slug) {
    entries_.push_back({file, "dangling_link", repo_slug + " -> " + paper_slug, 0, 1});
  }

  void summary(const std::string& file, std::size_t produced, std::size_t skipped) {
    ReportEntry e{file, "summary", "", 0, 1};
    e.index = produced;
    e.count = skipped;
    entries_.push_back(std::move(e));
  }

  const std::vector<ReportEntry>& entries() const { return entries_; }

  std::size_t count_of(const std::string& kind) const {
    std::size_t n = 0;
    for (const auto& e : entries_) {
      if (e.kind == kind) n += (e.kind == "unknown_key") ? e.count : 1;
    }
    return n;
  }

  void write_jsonl(std::ostream& out) const {
    for (const auto& e : entries_) {
      json line;
      line["file"] = e.file;
      line["kind"] = e.kind;
      if (e.kind == "summary") {
        line["records"] = e.index;
        line["skipped"] = e.count;
      } else {
        line["detail"] = e.detail;
        if (e.kind == "skipped_record") line["index"] = e.index;
        if (e.kind == "unknown_key") line["count"] = e.count;
      }
      out << line.dump() << '\n';
    }
    if (!out) throw SinkWriteError("ingest report stream");
  }

 private:
  std::vector<ReportEntry> entries_;
  std::map<std::string, std::size_t> unknown_index_;
};

// ---------------------------------------------------------------------------
// SAX array splitter
// ---------------------------------------------------------------------------

namespace detail {

// SAX handler that requires a top-level array and hands each element to a
// callback as a freshly built DOM value. Only one element is resident at a
// time. The container stack is explicit, so element depth is limited by
// memory rather than the call stack.
class ArrayElementSplitter : public nlohmann::json_sax<json> {
 public:
  using ElementFn = std::function<bool(json&&, std::size_t)>;

  explicit ArrayElementSplitter(ElementFn on_element) : on_element_(std::move(on_element)) {}

  bool wrong_shape() const { return wrong_shape_; }
  bool parse_failed() const { return parse_failed_; }
  std::size_t error_offset() const { return error_offset_; }
  const std::string& error_detail() const { return error_detail_; }

  bool null() override { return add(json(nullptr)); }
  bool boolean(bool v) override { return add(json(v)); }
  bool number_integer(number_integer_t v) override { return add(json(v)); }
  bool number_unsigned(number_unsigned_t v) override { return add(json(v)); }
  bool number_float(number_float_t v, const string_t&) override { return add(json(v)); }
  bool string(string_t& v) override { return add(json(std::move(v))); }
  bool binary(binary_t& v) override { return add(json(std::move(v))); }

  bool start_object(std::size_t) override {
    if (!root_seen_) {
      wrong_shape_ = true;
      return false;
    }
    return open_container(json::object());
  }

  bool key(string_t& v) override {
    pending_key_ = std::move(v);
    return true;
  }

  bool end_object() override { return close_container(); }

  bool start_array(std::size_t) override {
    if (!root_seen_) {
      root_seen_ = true;
      return true;
    }
    return open_container(json::array());
  }

  bool end_array() override {
    if (stack_.empty()) return true;  // the top-level array itself
    return close_container();
  }

  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    parse_failed_ = true;
    error_offset_ = position;
    error_detail_ = ex.what();
    return false;
  }

 private:
  bool add(json v) {
    if (!root_seen_) {
      wrong_shape_ = true;
      return false;
    }
    if (stack_.empty()) {
      current_ = std::move(v);
      return finish_element();
    }
    place(std::move(v));
    return true;
  }

  bool open_container(json v) {
    if (stack_.empty()) {
      current_ = std::move(v);
      stack_.push_back(&current_);
    } else {
      stack_.push_back(place(std::move(v)));
    }
    return true;
  }

  bool close_container() {
    stack_.pop_back();
    if (stack_.empty()) return finish_element();
    return true;
  }

  json* place(json v) {
    json* top = stack_.back();
    if (top->is_object()) {
      auto res = top->emplace(std::move(pending_key_), std::move(v));
      return &res.first.value();
    }
    top->push_back(std::move(v));
    return &top->back();
  }

  bool finish_element() {
    const bool keep_going = on_element_(std::move(current_), index_++);
    current_ = json();
    return keep_going;
  }

  ElementFn on_element_;
  json current_;
  std::vector<json*> stack_;
  std::string pending_key_;
  std::size_t index_ = 0;
  bool root_seen_ = false;
  bool wrong_shape_ = false;
  bool parse_failed_ = false;
  std::size_t error_offset_ = 0;
  std::string error_detail_;
};

// Walks a UTF-8 JSON stream whose top level must be an array, invoking fn
// once per element.
inline void for_each_array_element(std::istream& in,
                                   const std::function<bool(json&&, std::size_t)>& fn) {
  ArrayElementSplitter splitter(fn);
  const bool ok = json::sax_parse(in, &splitter);
  if (splitter.wrong_shape()) {
    throw WrongShapeError("expected a top-level array");
  }
  if (splitter.parse_failed()) {
    throw MalformedJsonError(splitter.error_offset(), splitter.error_detail());
  }
  (void)ok;  // false also covers an element callback requesting a stop
}

// ---------------------------------------------------------------------------
// Field mapping
// ---------------------------------------------------------------------------

inline std::optional<std::string> scalar_to_string(const json& v) {
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
  }
  if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, res.ptr);
  }
  return std::nullopt;
}

// Last path segment of a URL, slugified; "" when there is none.
inline std::string slug_from_url(std::string_view url) {
  while (!url.empty() && url.back() == '/') url.remove_suffix(1);
  std::size_t slash = url.find_last_of('/');
  if (slash != std::string_view::npos) url = url.substr(slash + 1);
  return ontology::slugify(url);
}

// Whole URL minus the scheme, slugified. Used for repositories, where the
// last path segment alone would collide across owners.
inline std::string slug_from_full_url(std::string_view url) {
  std::size_t scheme = url.find("://");
  if (scheme != std::string_view::npos) url = url.substr(scheme + 3);
  return ontology::slugify(url);
}

// Pulls a slug plus display name out of a link-list entry, which upstream is
// either a bare string or an object carrying url/name-like keys.
inline std::optional<LinkRef> link_entry(const json& v, const char* target_class) {
  if (v.is_string()) {
    const std::string& name = v.get_ref<const std::string&>();
    std::string slug = ontology::slugify(name);
    if (slug.empty()) return std::nullopt;
    return LinkRef{target_class, std::move(slug), name};
  }
  if (v.is_object()) {
    std::string name;
    for (const char* key : {"name", "task", "dataset", "title"}) {
      auto it = v.find(key);
      if (it != v.end() && it->is_string()) {
        name = it->get<std::string>();
        break;
      }
    }
    std::string slug;
    auto url = v.find("url");
    if (url != v.end() && url->is_string()) slug = slug_from_url(url->get<std::string>());
    if (slug.empty()) slug = ontology::slugify(name);
    if (slug.empty()) return std::nullopt;
    return LinkRef{target_class, std::move(slug), name.empty() ? slug : name};
  }
  return std::nullopt;
}

enum class FieldAction {
  SlugFromUrl,       // record slug := last URL path segment
  SlugFromFullUrl,   // record slug := whole URL minus scheme
  SlugFromName,      // fallback slug := slugify(value) if none yet
  Scalar,            // registry datatype property
  AuthorList,        // raw author name strings
  LinkList,          // array of link entries
  LinkSingle,        // one link entry (string or object)
  JoinPaperSlug,     // code links: which paper this repository belongs to
  Ignore,            // known upstream key we deliberately drop
};

struct FieldRule {
  const char* key;
  FieldAction action;
  const char* property = "";
  const char* target_class = "";
};

// One table per dump file kind: the complete inventory of upstream keys we
// understand, in precedence order. Keys absent from the table are reported,
// never silently dropped.
inline const std::vector<FieldRule>& rules_for(DumpFileKind kind) {
  static const std::vector<FieldRule> papers = {
      {"paper_url", FieldAction::SlugFromUrl},
      {"title", FieldAction::SlugFromName},
      {"title", FieldAction::Scalar, "title"},
      {"abstract", FieldAction::Scalar, "abstract"},
      {"arxiv_id", FieldAction::Scalar, "arxivId"},
      {"date", FieldAction::Scalar, "date"},
      {"url_abs", FieldAction::Scalar, "urlAbstract"},
      {"url_pdf", FieldAction::Scalar, "urlPdf"},
      {"proceeding", FieldAction::LinkSingle, "publishedIn", "Conference"},
      {"authors", FieldAction::AuthorList},
      {"tasks", FieldAction::LinkList, "hasTask", "Task"},
      {"methods", FieldAction::LinkList, "hasMethod", "Method"},
  };
  static const std::vector<FieldRule> code_links = {
      {"repo_url", FieldAction::SlugFromFullUrl},
      {"repo_url", FieldAction::Scalar, "repositoryUrl"},
      {"is_official", FieldAction::Scalar, "isOfficial"},
      {"framework", FieldAction::Scalar, "framework"},
      {"paper_url", FieldAction::JoinPaperSlug},
      {"paper_title", FieldAction::Ignore},     // join happens via paper_url
      {"paper_arxiv_id", FieldAction::Ignore},  // redundant with the papers file
  };
  static const std::vector<FieldRule> methods = {
      {"url", FieldAction::SlugFromUrl},
      {"name", FieldAction::SlugFromName},
      {"name", FieldAction::Scalar, "methodName"},
      {"full_name", FieldAction::Scalar, "methodFullName"},
      {"description", FieldAction::Scalar, "methodDescription"},
      {"introduced_year", FieldAction::Scalar, "introducedYear"},
      {"source_url", FieldAction::Scalar, "sourceUrl"},
      {"paper", FieldAction::LinkSingle, "introducedIn", "Paper"},
  };
  static const std::vector<FieldRule> datasets = {
      {"url", FieldAction::SlugFromUrl},
      {"name", FieldAction::SlugFromName},
      {"name", FieldAction::Scalar, "datasetName"},
      {"full_name", FieldAction::Scalar, "datasetFullName"},
      {"description", FieldAction::Scalar, "datasetDescription"},
      {"homepage", FieldAction::Scalar, "homepage"},
      {"introduced_date", FieldAction::Scalar, "introducedDate"},
      {"paper", FieldAction::LinkSingle, "introducedBy", "Paper"},
      {"tasks", FieldAction::LinkList, "usedForTask", "Task"},
      {"variants", FieldAction::LinkList, "hasVariant", "DatasetVariant"},
  };
  static const std::vector<FieldRule> none = {};
  switch (kind) {
    case DumpFileKind::Papers: return papers;
    case DumpFileKind::CodeLinks: return code_links;
    case DumpFileKind::Methods: return methods;
    case DumpFileKind::Datasets: return datasets;
    case DumpFileKind::EvaluationTables: return none;  // handled structurally
  }
  return none;
}

inline void apply_rule(const FieldRule& rule, const json& value, EntityRecord& rec) {
  switch (rule.action) {
    case FieldAction::SlugFromUrl:
      if (value.is_string()) rec.slug = slug_from_url(value.get_ref<const std::string&>());
      break;
    case FieldAction::SlugFromFullUrl:
      if (value.is_string()) rec.slug = slug_from_full_url(value.get_ref<const std::string&>());
      break;
    case FieldAction::SlugFromName:
      if (rec.slug.empty() && value.is_string()) {
        rec.slug = ontology::slugify(value.get_ref<const std::string&>());
      }
      break;
    case FieldAction::Scalar:
      if (auto s = scalar_to_string(value)) rec.scalars.emplace_back(rule.property, *s);
      break;
    case FieldAction::AuthorList:
      if (value.is_array()) {
        for (const auto& a : value) {
          if (a.is_string() && !a.get_ref<const std::string&>().empty()) {
            rec.author_names.push_back(a.get<std::string>());
          }
        }
      }
      break;
    case FieldAction::LinkList:
      if (value.is_array()) {
        for (const auto& entry : value) {
          if (auto ref = link_entry(entry, rule.target_class)) {
            rec.links.emplace_back(rule.property, std::move(*ref));
          }
        }
      }
      break;
    case FieldAction::LinkSingle:
      if (auto ref = link_entry(value, rule.target_class)) {
        rec.links.emplace_back(rule.property, std::move(*ref));
      }
      break;
    case FieldAction::JoinPaperSlug:
      if (value.is_string()) rec.join_paper_slug = slug_from_url(value.get_ref<const std::string&>());
      break;
    case FieldAction::Ignore:
      break;
  }
}

}  // namespace detail

// Checks a record against the registry: known class, non-empty slug, every
// scalar/link property registered. Returns the first violation, or nothing.
inline std::optional<std::string> validate_record(const EntityRecord& rec,
                                                  const ontology::Registry& registry) {
  if (!registry.find_class(rec.class_name)) return "unknown class " + rec.class_name;
  if (rec.slug.empty()) return "record has no usable slug";
  for (const auto& [prop, value] : rec.scalars) {
    const ontology::PropertyDescriptor* p = registry.find_property(prop);
    if (!p || p->kind != ontology::PropertyKind::Datatype) {
      return "unregistered scalar property " + prop;
    }
    (void)value;
  }
  for (const auto& [prop, ref] : rec.links) {
    const ontology::PropertyDescriptor* p = registry.find_property(prop);
    if (!p || p->kind != ontology::PropertyKind::Object) {
      return "unregistered link property " + prop;
    }
    if (!registry.find_class(ref.class_name)) return "link to unknown class " + ref.class_name;
    if (ref.slug.empty()) return "link with empty slug under " + prop;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Evaluation tables
// ---------------------------------------------------------------------------

struct EvaluationRow {
  std::string model_name;
  std::vector<std::pair<std::string, std::string>> metrics;  // metric name -> value
  std::string paper_slug;
};

// One node of the nested leaderboard structure: a task node, or a
// task-on-dataset node holding result rows. Children cover both subtasks and
// per-dataset tables.
struct EvaluationTableNode {
  std::string table_id;
  std::string task_name;
  std::string task_slug;
  std::string dataset_name;  // empty for pure task nodes
  std::string dataset_slug;
  std::vector<EvaluationRow> rows;
  std::vector<EvaluationTableNode> children;
};

struct TaskMeta {
  std::string slug;
  std::string name;
  std::string description;
  std::vector<std::string> areas;  // upstream "categories"
};

namespace detail {

inline EvaluationRow parse_row(const json& row) {
  EvaluationRow out;
  if (auto it = row.find("model_name"); it != row.end() && it->is_string()) {
    out.model_name = it->get<std::string>();
  }
  if (auto it = row.find("paper_url"); it != row.end() && it->is_string()) {
    out.paper_slug = slug_from_url(it->get<std::string>());
  } else if (auto p = row.find("paper"); p != row.end() && p->is_string()) {
    out.paper_slug = ontology::slugify(p->get<std::string>());
  }
  if (auto it = row.find("metrics"); it != row.end() && it->is_object()) {
    for (const auto& [name, value] : it->items()) {
      if (name.empty()) continue;  // metric names must be non-empty
      if (auto s = scalar_to_string(value)) out.metrics.emplace_back(name, *s);
    }
  }
  return out;
}

inline void parse_task_node(const json& elem, const std::string& file, IngestReport& report,
                            EvaluationTableNode& node);

inline EvaluationTableNode parse_dataset_node(const json& elem,
                                              const EvaluationTableNode& parent) {
  EvaluationTableNode node;
  node.task_name = parent.task_name;
  node.task_slug = parent.task_slug;
  if (auto it = elem.find("dataset"); it != elem.end() && it->is_string()) {
    node.dataset_name = it->get<std::string>();
    node.dataset_slug = ontology::slugify(node.dataset_name);
  }
  node.table_id = parent.table_id + "-on-" + node.dataset_slug;
  if (auto sota = elem.find("sota"); sota != elem.end() && sota->is_object()) {
    if (auto rows = sota->find("rows"); rows != sota->end() && rows->is_array()) {
      for (const auto& row : *rows) {
        if (row.is_object()) node.rows.push_back(parse_row(row));
      }
    }
  }
  return node;
}

inline void parse_task_node(const json& elem, const std::string& file, IngestReport& report,
                            EvaluationTableNode& node) {
  static const std::set<std::string> known = {"task",       "description", "categories",
                                              "datasets",   "subtasks",    "source_link"};
  for (const auto& [key, value] : elem.items()) {
    (void)value;
    if (!known.count(key)) report.unknown_key(file, key);
  }
  if (auto it = elem.find("task"); it != elem.end() && it->is_string()) {
    node.task_name = it->get<std::string>();
    node.task_slug = ontology::slugify(node.task_name);
  }
  node.table_id = node.task_slug;
  if (auto ds = elem.find("datasets"); ds != elem.end() && ds->is_array()) {
    for (const auto& d : *ds) {
      if (d.is_object()) node.children.push_back(parse_dataset_node(d, node));
    }
  }
  if (auto sub = elem.find("subtasks"); sub != elem.end() && sub->is_array()) {
    for (const auto& s : *sub) {
      if (!s.is_object()) continue;
      EvaluationTableNode child;
      parse_task_node(s, file, report, child);
      if (!child.task_slug.empty()) node.children.push_back(std::move(child));
    }
  }
}

}  // namespace detail

// Builds the leaderboard tree for one top-level element of
// evaluation-tables.json. Task nodes alternate with task-on-dataset nodes;
// rows live on the dataset level.
inline EvaluationTableNode parse_evaluation_element(const json& elem, const std::string& file,
                                                    IngestReport& report) {
  EvaluationTableNode root;
  if (elem.is_object()) detail::parse_task_node(elem, file, report, root);
  return root;
}

// Task names, descriptions, and research areas, collected in a pass separate
// from the table flattener so the flattener's record arithmetic stays
// node-plus-row exact.
inline void collect_task_areas(const json& elem, std::vector<TaskMeta>& out) {
  if (!elem.is_object()) return;
  TaskMeta meta;
  if (auto it = elem.find("task"); it != elem.end() && it->is_string()) {
    meta.name = it->get<std::string>();
    meta.slug = ontology::slugify(meta.name);
  }
  if (auto it = elem.find("description"); it != elem.end() && it->is_string()) {
    meta.description = it->get<std::string>();
  }
  if (auto it = elem.find("categories"); it != elem.end() && it->is_array()) {
    for (const auto& c : *it) {
      if (c.is_string() && !c.get_ref<const std::string&>().empty()) {
        meta.areas.push_back(c.get<std::string>());
      }
    }
  }
  if (!meta.slug.empty()) out.push_back(std::move(meta));
  if (auto sub = elem.find("subtasks"); sub != elem.end() && sub->is_array()) {
    for (const auto& s : *sub) collect_task_areas(s, out);
  }
}

struct FlattenStats {
  std::size_t nodes = 0;
  std::size_t rows = 0;
  std::size_t max_depth = 0;  // root = depth 1
  std::size_t deduplicated = 0;
};

namespace detail {

constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

inline void flatten_node(const EvaluationTableNode& node, std::size_t depth,
                         std::set<std::string>& path, std::set<std::string>& seen,
                         std::vector<EntityRecord>& out, FlattenStats& stats,
                         std::size_t parent_pos) {
  if (node.table_id.empty()) return;
  if (path.count(node.table_id)) throw CycleDetectedError(node.table_id);
  if (parent_pos != kNoParent) {
    out[parent_pos].links.emplace_back(
        "hasSubTable", LinkRef{"EvaluationTable", node.table_id, node.table_id});
  }
  if (!seen.insert(node.table_id).second) {
    ++stats.deduplicated;  // shared subtree already emitted
    return;
  }
  path.insert(node.table_id);
  stats.max_depth = std::max(stats.max_depth, depth);
  ++stats.nodes;

  EntityRecord table;
  table.class_name = "EvaluationTable";
  table.slug = node.table_id;
  if (!node.task_slug.empty()) {
    table.links.emplace_back("evaluatesTask", LinkRef{"Task", node.task_slug, node.task_name});
  }
  if (!node.dataset_slug.empty()) {
    table.links.emplace_back("onDataset",
                             LinkRef{"Dataset", node.dataset_slug, node.dataset_name});
  }
  const std::size_t table_pos = out.size();
  out.push_back(std::move(table));

  std::size_t row_no = 0;
  for (const EvaluationRow& row : node.rows) {
    ++stats.rows;
    ++row_no;
    EntityRecord result;
    result.class_name = "EvaluationResult";
    result.slug = node.table_id + "-row-" + std::to_string(row_no);
    out[table_pos].links.emplace_back(
        "hasResult", LinkRef{"EvaluationResult", result.slug, result.slug});
    if (!row.model_name.empty()) {
      std::string model_slug = ontology::slugify(row.model_name);
      if (!model_slug.empty()) {
        result.links.emplace_back("achievedBy",
                                  LinkRef{"Model", std::move(model_slug), row.model_name});
      }
    }
    for (const auto& [metric_name, value] : row.metrics) {
      std::string metric_slug = ontology::slugify(metric_name);
      if (metric_slug.empty()) continue;
      result.links.emplace_back("measuresMetric",
                                LinkRef{"Metric", std::move(metric_slug), metric_name});
      result.scalars.emplace_back("metricValue", value);
    }
    if (!row.paper_slug.empty()) {
      result.links.emplace_back("reportedIn", LinkRef{"Paper", row.paper_slug, row.paper_slug});
    }
    out.push_back(std::move(result));
  }

  for (const EvaluationTableNode& child : node.children) {
    flatten_node(child, depth + 1, path, seen, out, stats, table_pos);
  }
  path.erase(node.table_id);
}

}  // namespace detail

// Depth-first flattening of one leaderboard tree: one EvaluationTable record
// per node, one EvaluationResult record per row, so the output length is
// exactly node count + row count. `seen` deduplicates shared subtrees across
// calls; pass the same set for every tree of one file.
inline std::vector<EntityRecord> flatten_evaluation_tree(const EvaluationTableNode& root,
                                                         std::set<std::string>* seen = nullptr,
                                                         FlattenStats* stats_out = nullptr) {
  std::vector<EntityRecord> out;
  std::set<std::string> local_seen;
  std::set<std::string> path;
  FlattenStats stats;
  detail::flatten_node(root, 1, path, seen ? *seen : local_seen, out, stats, detail::kNoParent);
  if (stats_out) *stats_out = stats;
  return out;
}

// ---------------------------------------------------------------------------
// read_dump
// ---------------------------------------------------------------------------

using RecordSink = std::function<void(EntityRecord&&)>;

// Streams one dump file: validates each element against the field mapping
// and the registry, forwards good records to the sink in file order, and
// counts the rest. For evaluation tables, each element expands to its task
// metadata records followed by the flattened table/result records.
inline void read_dump(DumpFileKind kind, std::istream& in, const std::string& file_label,
                      const ontology::Registry& registry, IngestReport& report,
                      const RecordSink& sink) {
  std::size_t produced = 0;
  std::size_t skipped = 0;

  auto deliver = [&](EntityRecord&& rec, std::size_t index) {
    if (auto problem = validate_record(rec, registry)) {
      ++skipped;
      report.skipped_record(file_label, index, *problem);
      return;
    }
    ++produced;
    sink(std::move(rec));
  };

  if (kind == DumpFileKind::EvaluationTables) {
    std::set<std::string> seen_tables;
    std::set<std::string> seen_tasks;
    detail::for_each_array_element(in, [&](json&& elem, std::size_t index) {
      if (!elem.is_object()) {
        ++skipped;
        report.skipped_record(file_label, index, "element is not an object");
        return true;
      }
      std::vector<TaskMeta> tasks;
      collect_task_areas(elem, tasks);
      for (TaskMeta& meta : tasks) {
        if (!seen_tasks.insert(meta.slug).second) continue;
        EntityRecord rec;
        rec.class_name = "Task";
        rec.slug = meta.slug;
        rec.scalars.emplace_back("taskName", meta.name);
        if (!meta.description.empty()) {
          rec.scalars.emplace_back("taskDescription", meta.description);
        }
        for (const std::string& area : meta.areas) {
          std::string area_slug = ontology::slugify(area);
          if (area_slug.empty()) continue;
          rec.links.emplace_back("hasArea", LinkRef{"Area", std::move(area_slug), area});
        }
        deliver(std::move(rec), index);
      }
      EvaluationTableNode root = parse_evaluation_element(elem, file_label, report);
      if (root.table_id.empty()) {
        ++skipped;
        report.skipped_record(file_label, index, "element has no task name");
        return true;
      }
      for (EntityRecord& rec : flatten_evaluation_tree(root, &seen_tables)) {
        deliver(std::move(rec), index);
      }
      return true;
    });
    report.summary(file_label, produced, skipped);
    return;
  }

  const std::vector<detail::FieldRule>& rules = detail::rules_for(kind);
  detail::for_each_array_element(in, [&](json&& elem, std::size_t index) {
    if (!elem.is_object()) {
      ++skipped;
      report.skipped_record(file_label, index, "element is not an object");
      return true;
    }
    EntityRecord rec;
    rec.class_name = class_for_kind(kind);
    for (const detail::FieldRule& rule : rules) {
      auto it = elem.find(rule.key);
      if (it != elem.end()) detail::apply_rule(rule, *it, rec);
    }
    for (const auto& [key, value] : elem.items()) {
      (void)value;
      bool known = false;
      for (const detail::FieldRule& rule : rules) {
        if (key == rule.key) {
          known = true;
          break;
        }
      }
      if (!known) report.unknown_key(file_label, key);
    }
    deliver(std::move(rec), index);
    return true;
  });
  report.summary(file_label, produced, skipped);
}

inline std::vector<EntityRecord> read_dump(DumpFileKind kind, std::istream& in,
                                           const std::string& file_label,
                                           const ontology::Registry& registry,
                                           IngestReport& report) {
  std::vector<EntityRecord> out;
  read_dump(kind, in, file_label, registry, report,
            [&](EntityRecord&& rec) { out.push_back(std::move(rec)); });
  return out;
}

// Opens a dump file by path (gzip sniffed from magic bytes, kind from the
// file name) and streams it.
inline void read_dump_file(const std::string& path, const ontology::Registry& registry,
                           IngestReport& report, const RecordSink& sink) {
  std::optional<DumpFileKind> kind = kind_for_filename(path);
  if (!kind) throw ConfigError("not a recognized dump file name: " + path);
  gzipio::InputFile in(path);
  std::size_t slash = path.find_last_of("/\\");
  read_dump(*kind, in.stream(), slash == std::string::npos ? path : path.substr(slash + 1),
            registry, report, sink);
}

// Attaches repository links to their papers. Repositories referencing a
// paper slug that is not present are counted and reported, not fatal.
// Returns the number of papers that gained at least one link.
inline std::size_t join_code_links(std::vector<EntityRecord>& papers,
                                   const std::vector<EntityRecord>& repositories,
                                   const std::string& file_label, IngestReport& report) {
  std::map<std::string, EntityRecord*> by_slug;
  for (EntityRecord& p : papers) {
    if (p.class_name == "Paper") by_slug.emplace(p.slug, &p);
  }
  std::set<std::string> enriched;
  for (const EntityRecord& repo : repositories) {
    if (repo.class_name != "Repository") continue;
    auto it = repo.join_paper_slug.empty() ? by_slug.end() : by_slug.find(repo.join_paper_slug);
    if (it == by_slug.end()) {
      report.dangling_link(file_label, repo.slug, repo.join_paper_slug);
      continue;
    }
    it->second->links.emplace_back("hasRepository",
                                   LinkRef{"Repository", repo.slug, repo.slug});
    bool official = false;
    for (const auto& [prop, value] : repo.scalars) {
      if (prop == "isOfficial" && value == "true") official = true;
    }
    if (official) {
      it->second->links.emplace_back("hasOfficialRepository",
                                     LinkRef{"Repository", repo.slug, repo.slug});
    }
    enriched.insert(it->first);
  }
  return enriched.size();
}

}  // namespace kgforge::ingest
