// Triple model, deduplicating graph buffer, and deterministic N-Triples /
// Turtle serialization with parse-back for the validate and stats paths.
#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgforge/errors.hpp"
#include "kgforge/unicode.hpp"

namespace kgforge::rdf {

namespace iris {
inline constexpr std::string_view rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view rdf_lang_string =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
inline constexpr std::string_view rdfs_domain = "http://www.w3.org/2000/01/rdf-schema#domain";
inline constexpr std::string_view rdfs_range = "http://www.w3.org/2000/01/rdf-schema#range";
inline constexpr std::string_view rdfs_label = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view owl_class = "http://www.w3.org/2002/07/owl#Class";
inline constexpr std::string_view owl_object_property =
    "http://www.w3.org/2002/07/owl#ObjectProperty";
inline constexpr std::string_view owl_datatype_property =
    "http://www.w3.org/2002/07/owl#DatatypeProperty";
inline constexpr std::string_view owl_same_as = "http://www.w3.org/2002/07/owl#sameAs";
inline constexpr std::string_view xsd_string = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view xsd_boolean = "http://www.w3.org/2001/XMLSchema#boolean";
inline constexpr std::string_view xsd_integer = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view xsd_double = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view xsd_date = "http://www.w3.org/2001/XMLSchema#date";
inline constexpr std::string_view xsd_gyear = "http://www.w3.org/2001/XMLSchema#gYear";
inline constexpr std::string_view xsd_any_uri = "http://www.w3.org/2001/XMLSchema#anyURI";
inline constexpr std::string_view void_dataset = "http://rdfs.org/ns/void#Dataset";
inline constexpr std::string_view void_linkset = "http://rdfs.org/ns/void#Linkset";
inline constexpr std::string_view void_triples = "http://rdfs.org/ns/void#triples";
inline constexpr std::string_view void_entities = "http://rdfs.org/ns/void#entities";
inline constexpr std::string_view void_class = "http://rdfs.org/ns/void#class";
inline constexpr std::string_view void_class_partition =
    "http://rdfs.org/ns/void#classPartition";
inline constexpr std::string_view void_subjects_target =
    "http://rdfs.org/ns/void#subjectsTarget";
inline constexpr std::string_view void_objects_target = "http://rdfs.org/ns/void#objectsTarget";
inline constexpr std::string_view void_link_predicate = "http://rdfs.org/ns/void#linkPredicate";
inline constexpr std::string_view dcterms_license = "http://purl.org/dc/terms/license";
inline constexpr std::string_view dcterms_modified = "http://purl.org/dc/terms/modified";
}  // namespace iris

inline bool is_valid_iri(std::string_view s) {
  if (s.empty()) return false;
  if (s.find(':') == std::string_view::npos) return false;  // absolute IRIs only
  for (unsigned char c : s) {
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`' || c == 0x7F) {
      return false;
    }
  }
  return true;
}

// N-Triples literal escaping: backslash, quote, LF, CR, TAB. Everything else
// is raw UTF-8.
inline std::string escape_ntriples_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

class Term {
 public:
  enum class Kind { Iri, Literal };

  static Term iri(std::string value) {
    if (!is_valid_iri(value)) throw Error("invalid IRI: \"" + value + "\"");
    Term t;
    t.kind_ = Kind::Iri;
    t.value_ = std::move(value);
    return t;
  }

  static Term literal(std::string lexical, std::string datatype = std::string(iris::xsd_string)) {
    if (datatype == iris::rdf_lang_string) {
      throw Error("language-string literal requires a language tag");
    }
    if (!is_valid_iri(datatype)) throw Error("invalid datatype IRI: " + datatype);
    Term t;
    t.kind_ = Kind::Literal;
    t.value_ = std::move(lexical);
    t.datatype_ = std::move(datatype);
    return t;
  }

  static Term lang_literal(std::string lexical, std::string lang) {
    if (lang.empty()) throw Error("empty language tag");
    Term t;
    t.kind_ = Kind::Literal;
    t.value_ = std::move(lexical);
    t.datatype_ = iris::rdf_lang_string;
    t.lang_ = std::move(lang);
    return t;
  }

  Kind kind() const { return kind_; }
  bool is_iri() const { return kind_ == Kind::Iri; }
  bool is_literal() const { return kind_ == Kind::Literal; }
  const std::string& value() const { return value_; }
  const std::string& datatype() const { return datatype_; }
  const std::string& lang() const { return lang_; }

  // N-Triples token; xsd:string literals canonically omit the datatype.
  std::string canonical() const {
    if (kind_ == Kind::Iri) return "<" + value_ + ">";
    std::string out = "\"" + escape_ntriples_literal(value_) + "\"";
    if (!lang_.empty()) {
      out += "@" + lang_;
    } else if (datatype_ != iris::xsd_string) {
      out += "^^<" + datatype_ + ">";
    }
    return out;
  }

  bool operator==(const Term& o) const {
    return kind_ == o.kind_ && value_ == o.value_ && datatype_ == o.datatype_ && lang_ == o.lang_;
  }

 private:
  Kind kind_ = Kind::Iri;
  std::string value_;
  std::string datatype_;
  std::string lang_;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  Triple(Term s, Term p, Term o)
      : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
    if (!subject.is_iri()) throw Error("triple subject must be an IRI");
    if (!predicate.is_iri()) throw Error("triple predicate must be an IRI");
  }

  std::string to_ntriples() const {
    return subject.canonical() + " " + predicate.canonical() + " " + object.canonical() + " .";
  }

  bool operator==(const Triple& o) const {
    return subject == o.subject && predicate == o.predicate && object == o.object;
  }
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::hash<std::string> h;
    std::size_t seed = h(t.subject.value());
    auto mix = [&seed](std::size_t v) {
      seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    };
    mix(h(t.predicate.value()));
    mix(h(t.object.value()));
    mix(h(t.object.datatype()));
    mix(h(t.object.lang()));
    mix(static_cast<std::size_t>(t.object.kind()));
    return seed;
  }
};

// Deduplicating triple store with a per-class subject index. Inserts are
// serialized internally; reads assume a frozen graph.
class GraphBuffer {
 public:
  bool insert(Triple t) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, fresh] = triples_.insert(std::move(t));
    if (fresh) {
      subjects_.insert(it->subject.value());
      if (it->predicate.value() == iris::rdf_type && it->object.is_iri()) {
        by_class_[it->object.value()].insert(it->subject.value());
      }
    }
    return fresh;
  }

  std::size_t insert_all(const std::vector<Triple>& ts) {
    std::size_t added = 0;
    for (const Triple& t : ts) added += insert(t) ? 1 : 0;
    return added;
  }

  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  bool has_subject(const std::string& iri) const { return subjects_.count(iri) > 0; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  const std::set<std::string>& subjects_of_class(const std::string& class_iri) const {
    static const std::set<std::string> kEmpty;
    auto it = by_class_.find(class_iri);
    return it == by_class_.end() ? kEmpty : it->second;
  }

  auto begin() const { return triples_.begin(); }
  auto end() const { return triples_.end(); }

 private:
  std::unordered_set<Triple, TripleHash> triples_;
  std::unordered_set<std::string> subjects_;
  std::unordered_map<std::string, std::set<std::string>> by_class_;
  std::mutex mutex_;
};

enum class Format { NTriples, Turtle };

using PrefixMap = std::vector<std::pair<std::string, std::string>>;  // prefix -> namespace

inline PrefixMap default_prefixes(const std::string& instance_base,
                                  const std::string& ontology_base) {
  return {
      {"lpwc", ontology_base},
      {"lpwcr", instance_base},
      {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
      {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
      {"owl", "http://www.w3.org/2002/07/owl#"},
      {"xsd", "http://www.w3.org/2001/XMLSchema#"},
      {"void", "http://rdfs.org/ns/void#"},
      {"dcterms", "http://purl.org/dc/terms/"},
  };
}

namespace detail {

inline bool turtle_local_ok(std::string_view local) {
  if (local.empty()) return false;
  auto ok = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  };
  for (char c : local) {
    if (!ok(c)) return false;
  }
  return local.front() != '-';
}

inline std::string turtle_iri(const std::string& iri, const PrefixMap& prefixes) {
  for (const auto& [prefix, ns] : prefixes) {
    if (iri.size() > ns.size() && iri.compare(0, ns.size(), ns) == 0) {
      std::string_view local(iri.data() + ns.size(), iri.size() - ns.size());
      if (turtle_local_ok(local)) return prefix + ":" + std::string(local);
    }
  }
  return "<" + iri + ">";
}

inline std::string turtle_term(const Term& t, const PrefixMap& prefixes) {
  if (t.is_iri()) return turtle_iri(t.value(), prefixes);
  std::string out = "\"" + escape_ntriples_literal(t.value()) + "\"";
  if (!t.lang().empty()) {
    out += "@" + t.lang();
  } else if (t.datatype() != iris::xsd_string) {
    out += "^^" + turtle_iri(t.datatype(), prefixes);
  }
  return out;
}

}  // namespace detail

// Writes the graph sorted by the canonical N-Triples form of each statement,
// making the output a pure function of the triple set. Returns the number of
// statements written.
inline std::size_t serialize(const GraphBuffer& graph, Format format, std::ostream& sink,
                             const PrefixMap& prefixes = {}) {
  std::vector<std::pair<std::string, const Triple*>> lines;
  lines.reserve(graph.size());
  for (const Triple& t : graph) lines.emplace_back(t.to_ntriples(), &t);
  std::sort(lines.begin(), lines.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  if (format == Format::NTriples) {
    for (const auto& [line, t] : lines) {
      sink << line << '\n';
      if (!sink) throw SinkWriteError("N-Triples sink");
    }
  } else {
    for (const auto& [prefix, ns] : prefixes) {
      sink << "@prefix " << prefix << ": <" << ns << "> .\n";
    }
    if (!prefixes.empty() && !lines.empty()) sink << "\n";
    for (const auto& [line, t] : lines) {
      sink << detail::turtle_term(t->subject, prefixes) << ' '
           << detail::turtle_term(t->predicate, prefixes) << ' '
           << detail::turtle_term(t->object, prefixes) << " .\n";
      if (!sink) throw SinkWriteError("Turtle sink");
    }
  }
  sink.flush();
  if (!sink) throw SinkWriteError("flush");
  return lines.size();
}

namespace detail {

inline void skip_ws(std::string_view s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline std::string parse_iri_token(std::string_view s, std::size_t& i, std::size_t lineno) {
  if (i >= s.size() || s[i] != '<') {
    throw Error("N-Triples parse error at line " + std::to_string(lineno) + ": expected IRI");
  }
  std::size_t close = s.find('>', i + 1);
  if (close == std::string_view::npos) {
    throw Error("N-Triples parse error at line " + std::to_string(lineno) + ": unterminated IRI");
  }
  std::string iri(s.substr(i + 1, close - i - 1));
  i = close + 1;
  return iri;
}

inline std::string unescape_literal(std::string_view s, std::size_t lineno) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 1 >= s.size()) {
      throw Error("N-Triples parse error at line " + std::to_string(lineno) +
                  ": dangling backslash");
    }
    char e = s[++i];
    switch (e) {
      case '\\': out.push_back('\\'); break;
      case '"': out.push_back('"'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 't': out.push_back('\t'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 'u':
      case 'U': {
        const std::size_t n = (e == 'u') ? 4 : 8;
        if (i + n >= s.size()) {
          throw Error("N-Triples parse error at line " + std::to_string(lineno) +
                      ": truncated \\u escape");
        }
        char32_t cp = 0;
        for (std::size_t k = 1; k <= n; ++k) {
          char c = s[i + k];
          cp <<= 4;
          if (c >= '0' && c <= '9') cp |= static_cast<char32_t>(c - '0');
          else if (c >= 'a' && c <= 'f') cp |= static_cast<char32_t>(c - 'a' + 10);
          else if (c >= 'A' && c <= 'F') cp |= static_cast<char32_t>(c - 'A' + 10);
          else
            throw Error("N-Triples parse error at line " + std::to_string(lineno) +
                        ": bad \\u escape");
        }
        i += n;
        unicode::encode(cp, out);
        break;
      }
      default:
        throw Error("N-Triples parse error at line " + std::to_string(lineno) +
                    ": unknown escape \\" + std::string(1, e));
    }
  }
  return out;
}

// Scans a quoted literal body honoring escapes; returns the raw (still
// escaped) body and leaves i past the closing quote.
inline std::string_view scan_quoted(std::string_view s, std::size_t& i, std::size_t lineno) {
  const std::size_t start = i + 1;
  std::size_t j = start;
  while (j < s.size()) {
    if (s[j] == '\\') {
      j += 2;
      continue;
    }
    if (s[j] == '"') break;
    ++j;
  }
  if (j >= s.size()) {
    throw Error("N-Triples parse error at line " + std::to_string(lineno) +
                ": unterminated literal");
  }
  i = j + 1;
  return s.substr(start, j - start);
}

inline Term parse_object_token(std::string_view s, std::size_t& i, std::size_t lineno,
                               const std::unordered_map<std::string, std::string>* prefixes);

inline std::string expand_prefixed(std::string_view s, std::size_t& i, std::size_t lineno,
                                   const std::unordered_map<std::string, std::string>& prefixes) {
  std::size_t j = i;
  while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
  std::string_view token = s.substr(i, j - i);
  std::size_t colon = token.find(':');
  if (colon == std::string_view::npos) {
    throw Error("Turtle parse error at line " + std::to_string(lineno) + ": expected IRI, got '" +
                std::string(token) + "'");
  }
  std::string prefix(token.substr(0, colon));
  auto it = prefixes.find(prefix);
  if (it == prefixes.end()) {
    throw Error("Turtle parse error at line " + std::to_string(lineno) + ": unknown prefix '" +
                prefix + "'");
  }
  i = j;
  return it->second + std::string(token.substr(colon + 1));
}

inline std::string parse_any_iri(std::string_view s, std::size_t& i, std::size_t lineno,
                                 const std::unordered_map<std::string, std::string>* prefixes) {
  if (i < s.size() && s[i] == '<') return parse_iri_token(s, i, lineno);
  if (prefixes) return expand_prefixed(s, i, lineno, *prefixes);
  throw Error("N-Triples parse error at line " + std::to_string(lineno) + ": expected IRI");
}

inline Term parse_object_token(std::string_view s, std::size_t& i, std::size_t lineno,
                               const std::unordered_map<std::string, std::string>* prefixes) {
  if (i < s.size() && s[i] == '"') {
    std::string lexical = unescape_literal(scan_quoted(s, i, lineno), lineno);
    if (i < s.size() && s[i] == '@') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
      std::string lang(s.substr(i + 1, j - i - 1));
      i = j;
      return Term::lang_literal(std::move(lexical), std::move(lang));
    }
    if (i + 1 < s.size() && s[i] == '^' && s[i + 1] == '^') {
      i += 2;
      std::string dt = parse_any_iri(s, i, lineno, prefixes);
      return Term::literal(std::move(lexical), std::move(dt));
    }
    return Term::literal(std::move(lexical));
  }
  return Term::iri(parse_any_iri(s, i, lineno, prefixes));
}

}  // namespace detail

// Line-oriented parser for the N-Triples and single-statement-per-line Turtle
// this toolkit writes. Not a general RDF parser.
inline std::size_t parse_into(std::istream& in, GraphBuffer& graph) {
  std::unordered_map<std::string, std::string> prefixes;
  std::string line;
  std::size_t lineno = 0;
  std::size_t parsed = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t i = 0;
    detail::skip_ws(line, i);
    if (i >= line.size() || line[i] == '#') continue;
    if (line.compare(i, 7, "@prefix") == 0) {
      i += 7;
      detail::skip_ws(line, i);
      std::size_t colon = line.find(':', i);
      if (colon == std::string::npos) throw Error("bad @prefix at line " + std::to_string(lineno));
      std::string prefix = line.substr(i, colon - i);
      i = colon + 1;
      detail::skip_ws(line, i);
      prefixes[prefix] = detail::parse_iri_token(line, i, lineno);
      continue;
    }
    const auto* pmap = prefixes.empty() ? nullptr : &prefixes;
    std::string subject = detail::parse_any_iri(line, i, lineno, pmap);
    detail::skip_ws(line, i);
    std::string predicate = detail::parse_any_iri(line, i, lineno, pmap);
    detail::skip_ws(line, i);
    Term object = detail::parse_object_token(line, i, lineno, pmap);
    detail::skip_ws(line, i);
    if (i >= line.size() || line[i] != '.') {
      throw Error("parse error at line " + std::to_string(lineno) + ": missing terminating dot");
    }
    graph.insert(Triple(Term::iri(std::move(subject)), Term::iri(std::move(predicate)),
                        std::move(object)));
    ++parsed;
  }
  return parsed;
}

}  // namespace kgforge::rdf
