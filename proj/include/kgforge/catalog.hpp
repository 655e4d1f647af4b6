// Catalog clients for entity linking. The linker talks to a CatalogClient
// interface; behind it sit two interchangeable implementations: an offline
// catalog backed by a local JSON fixture file, and a remote SPARQL-protocol
// client with retries, a bounded in-flight window, and a persistent response
// cache so re-runs are offline-reproducible.
#pragma once

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgforge/errors.hpp"
#include "kgforge/textnorm.hpp"
#include "kgforge/unicode.hpp"

namespace kgforge::catalog {

using json = nlohmann::json;

// An external author candidate: identifier, display name, and the titles of
// works attributed to them.
struct CatalogCandidate {
  std::string external_id;
  std::string display_name;
  std::vector<std::string> work_titles;
};

struct WorkAuthor {
  std::string iri;
  std::string name;
};

// One work matched by a title variant, with its byline.
struct WorkHit {
  std::string work_iri;
  std::string title;
  std::vector<WorkAuthor> authors;
};

class CatalogClient {
 public:
  virtual ~CatalogClient() = default;

  // Authors whose name matches (case-insensitively, NFC) the given name.
  virtual std::vector<CatalogCandidate> candidates_by_name(const std::string& name) = 0;
  // Works whose normalized title equals the given (already normalized) variant.
  virtual std::vector<WorkHit> works_by_title_variant(const std::string& variant) = 0;
  // External conference IRIs matching either the full name or the acronym.
  virtual std::vector<std::string> conference_lookup(const std::string& name,
                                                     const std::string& acronym) = 0;
  // External dataset IRIs whose label matches the given label exactly
  // (after normalization).
  virtual std::vector<std::string> dataset_lookup(const std::string& label) = 0;
};

namespace detail {

inline std::string fold_name(std::string_view s) {
  return unicode::lowercase(unicode::nfc(s));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Offline fixture catalog
// ---------------------------------------------------------------------------

// Backed by one JSON file:
//   {
//     "authors":     [{"id", "name", "works": [title, ...]}, ...],
//     "works":       [{"id", "title", "authors": [{"id", "name"}, ...]}, ...],
//     "conferences": [{"id", "name", "acronym"}, ...],
//     "datasets":    [{"id", "label"}, ...]
//   }
// All lookups are exact after the same normalization the linker uses, so the
// fixture behaves like a remote catalog whose queries filter on normalized
// strings.
class FixtureCatalog : public CatalogClient {
 public:
  static FixtureCatalog from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open fixture catalog: " + path);
    json doc = json::parse(in, nullptr, true);
    return FixtureCatalog(doc);
  }

  explicit FixtureCatalog(const json& doc) {
    for (const auto& a : doc.value("authors", json::array())) {
      CatalogCandidate c;
      c.external_id = a.value("id", "");
      c.display_name = a.value("name", "");
      for (const auto& w : a.value("works", json::array())) {
        if (w.is_string()) c.work_titles.push_back(w.get<std::string>());
      }
      if (c.external_id.empty() || c.display_name.empty()) continue;
      authors_by_name_[detail::fold_name(c.display_name)].push_back(std::move(c));
    }
    for (const auto& w : doc.value("works", json::array())) {
      WorkHit hit;
      hit.work_iri = w.value("id", "");
      hit.title = w.value("title", "");
      for (const auto& a : w.value("authors", json::array())) {
        if (a.is_object()) {
          hit.authors.push_back({a.value("id", ""), a.value("name", "")});
        } else if (a.is_string()) {
          hit.authors.push_back({"", a.get<std::string>()});
        }
      }
      if (hit.work_iri.empty() || hit.title.empty()) continue;
      works_by_title_[textnorm::normalize(hit.title).value].push_back(std::move(hit));
    }
    for (const auto& c : doc.value("conferences", json::array())) {
      const std::string id = c.value("id", "");
      if (id.empty()) continue;
      if (std::string name = c.value("name", ""); !name.empty()) {
        conferences_[textnorm::normalize(name).value].push_back(id);
      }
      if (std::string acronym = c.value("acronym", ""); !acronym.empty()) {
        conferences_[textnorm::normalize(acronym).value].push_back(id);
      }
    }
    for (const auto& d : doc.value("datasets", json::array())) {
      const std::string id = d.value("id", "");
      const std::string label = d.value("label", "");
      if (id.empty() || label.empty()) continue;
      datasets_[textnorm::normalize(label).value].push_back(id);
    }
  }

  std::vector<CatalogCandidate> candidates_by_name(const std::string& name) override {
    auto it = authors_by_name_.find(detail::fold_name(name));
    return it == authors_by_name_.end() ? std::vector<CatalogCandidate>{} : it->second;
  }

  std::vector<WorkHit> works_by_title_variant(const std::string& variant) override {
    auto it = works_by_title_.find(variant);
    return it == works_by_title_.end() ? std::vector<WorkHit>{} : it->second;
  }

  std::vector<std::string> conference_lookup(const std::string& name,
                                             const std::string& acronym) override {
    std::vector<std::string> out;
    auto add = [&](const std::string& key) {
      auto it = conferences_.find(key);
      if (it == conferences_.end()) return;
      for (const std::string& id : it->second) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
      }
    };
    if (!name.empty()) add(textnorm::normalize(name).value);
    if (!acronym.empty()) add(textnorm::normalize(acronym).value);
    return out;
  }

  std::vector<std::string> dataset_lookup(const std::string& label) override {
    auto it = datasets_.find(textnorm::normalize(label).value);
    return it == datasets_.end() ? std::vector<std::string>{} : it->second;
  }

 private:
  std::map<std::string, std::vector<CatalogCandidate>> authors_by_name_;
  std::map<std::string, std::vector<WorkHit>> works_by_title_;
  std::map<std::string, std::vector<std::string>> conferences_;
  std::map<std::string, std::vector<std::string>> datasets_;
};

// ---------------------------------------------------------------------------
// Remote SPARQL catalog
// ---------------------------------------------------------------------------

struct RemoteOptions {
  int retries = 3;              // attempts in total
  int backoff_base_ms = 1000;   // 1s, 2s, 4s
  int timeout_seconds = 30;     // per query
  int max_in_flight = 4;        // concurrent requests across all workers
  std::string cache_path;       // JSONL response cache; empty disables caching
};

namespace detail {

inline std::string sparql_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

// Splits "https://host[:port]/some/path" into client base and path.
inline std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("catalog endpoint needs a scheme: " + url);
  std::size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

}  // namespace detail

// SPARQL-protocol client (HTTP POST, application/sparql-results+json) with
// bounded concurrency, exponential-backoff retries, and an append-only
// response cache keyed by the exact query string.
class RemoteCatalog : public CatalogClient {
 public:
  RemoteCatalog(std::string endpoint_url, RemoteOptions options = {})
      : endpoint_url_(std::move(endpoint_url)),
        options_(options),
        in_flight_(options.max_in_flight > 0 ? options.max_in_flight : 1) {
    if (!options_.cache_path.empty()) load_cache();
  }

  std::vector<CatalogCandidate> candidates_by_name(const std::string& name) override {
    const std::string folded = detail::sparql_escape(detail::fold_name(name));
    const std::string query =
        "PREFIX foaf: <http://xmlns.com/foaf/0.1/> "
        "PREFIX dcterms: <http://purl.org/dc/terms/> "
        "SELECT ?author ?name ?title WHERE { "
        "?author foaf:name ?name . "
        "?work dcterms:creator ?author . "
        "?work dcterms:title ?title . "
        "FILTER(LCASE(STR(?name)) = \"" + folded + "\") } LIMIT 1000";
    json rows = run(query);
    // Group rows by author IRI; each row contributes one work title.
    std::map<std::string, CatalogCandidate> grouped;
    for (const auto& b : rows) {
      const std::string iri = binding(b, "author");
      if (iri.empty()) continue;
      CatalogCandidate& c = grouped[iri];
      c.external_id = iri;
      if (c.display_name.empty()) c.display_name = binding(b, "name");
      const std::string title = binding(b, "title");
      if (!title.empty()) c.work_titles.push_back(title);
    }
    std::vector<CatalogCandidate> out;
    out.reserve(grouped.size());
    for (auto& [iri, c] : grouped) out.push_back(std::move(c));
    return out;
  }

  std::vector<WorkHit> works_by_title_variant(const std::string& variant) override {
    const std::string query =
        "PREFIX foaf: <http://xmlns.com/foaf/0.1/> "
        "PREFIX dcterms: <http://purl.org/dc/terms/> "
        "SELECT ?work ?title ?author ?authorName WHERE { "
        "?work dcterms:title ?title . "
        "?work dcterms:creator ?author . "
        "?author foaf:name ?authorName . "
        "FILTER(LCASE(STR(?title)) = \"" + detail::sparql_escape(variant) + "\") } LIMIT 1000";
    json rows = run(query);
    std::map<std::string, WorkHit> grouped;
    for (const auto& b : rows) {
      const std::string iri = binding(b, "work");
      if (iri.empty()) continue;
      WorkHit& hit = grouped[iri];
      hit.work_iri = iri;
      if (hit.title.empty()) hit.title = binding(b, "title");
      const std::string author = binding(b, "author");
      const std::string author_name = binding(b, "authorName");
      if (!author.empty()) hit.authors.push_back({author, author_name});
    }
    std::vector<WorkHit> out;
    out.reserve(grouped.size());
    for (auto& [iri, hit] : grouped) out.push_back(std::move(hit));
    return out;
  }

  std::vector<std::string> conference_lookup(const std::string& name,
                                             const std::string& acronym) override {
    const std::string query =
        "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> "
        "SELECT DISTINCT ?conf WHERE { ?conf rdfs:label ?label . "
        "FILTER(LCASE(STR(?label)) = \"" + detail::sparql_escape(detail::fold_name(name)) +
        "\" || LCASE(STR(?label)) = \"" + detail::sparql_escape(detail::fold_name(acronym)) +
        "\") } LIMIT 10";
    return iri_column(run(query), "conf");
  }

  std::vector<std::string> dataset_lookup(const std::string& label) override {
    const std::string query =
        "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> "
        "SELECT DISTINCT ?ds WHERE { ?ds rdfs:label ?label . "
        "FILTER(LCASE(STR(?label)) = \"" + detail::sparql_escape(detail::fold_name(label)) +
        "\") } LIMIT 10";
    return iri_column(run(query), "ds");
  }

  std::size_t http_requests() const { return http_requests_; }

 private:
  static std::string binding(const json& row, const char* var) {
    auto it = row.find(var);
    if (it == row.end() || !it->is_object()) return "";
    return it->value("value", "");
  }

  static std::vector<std::string> iri_column(const json& rows, const char* var) {
    std::vector<std::string> out;
    for (const auto& b : rows) {
      std::string iri = binding(b, var);
      if (!iri.empty() && std::find(out.begin(), out.end(), iri) == out.end()) {
        out.push_back(std::move(iri));
      }
    }
    return out;
  }

  // Returns the bindings array for a query, via cache or HTTP.
  json run(const std::string& query) {
    {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      auto it = cache_.find(query);
      if (it != cache_.end()) return parse_bindings(it->second, query);
    }
    const std::string body = fetch(query);
    {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      if (cache_.emplace(query, body).second && !options_.cache_path.empty()) {
        append_cache_line(query, body);
      }
    }
    return parse_bindings(body, query);
  }

  std::string fetch(const std::string& query) {
    auto [base, path] = detail::split_endpoint(endpoint_url_);
    std::string last_error;
    for (int attempt = 0; attempt < options_.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(options_.backoff_base_ms << (attempt - 1)));
      }
      in_flight_.acquire();
      httplib::Client client(base);
      client.set_read_timeout(options_.timeout_seconds, 0);
      client.set_connection_timeout(options_.timeout_seconds, 0);
      httplib::Params params{{"query", query}};
      httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
      auto res = client.Post(path, headers, params);
      ++http_requests_;
      in_flight_.release();
      if (res && res->status == 200) return res->body;
      last_error = res ? "HTTP " + std::to_string(res->status)
                       : "transport: " + httplib::to_string(res.error());
    }
    throw CatalogUnavailableError(endpoint_url_ + " after " + std::to_string(options_.retries) +
                                  " attempts (" + last_error + ")");
  }

  static json parse_bindings(const std::string& body, const std::string& query) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) {
      throw CatalogUnavailableError("response to [" + query + "] is not valid JSON");
    }
    if (!doc.contains("results") || !doc["results"].contains("bindings") ||
        !doc["results"]["bindings"].is_array()) {
      throw CatalogUnavailableError("response to [" + query + "] lacks results.bindings");
    }
    return doc["results"]["bindings"];
  }

  void load_cache() {
    std::ifstream in(options_.cache_path, std::ios::binary);
    if (!in) return;  // cache starts empty
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json entry = json::parse(line, nullptr, false);
      if (entry.is_discarded() || !entry.is_object()) continue;
      std::string q = entry.value("query", "");
      if (!q.empty() && entry.contains("body") && entry["body"].is_string()) {
        cache_.emplace(std::move(q), entry["body"].get<std::string>());
      }
    }
  }

  void append_cache_line(const std::string& query, const std::string& body) {
    std::ofstream out(options_.cache_path, std::ios::binary | std::ios::app);
    if (!out) return;  // caching is best-effort
    json entry;
    entry["query"] = query;
    entry["body"] = body;
    out << entry.dump() << '\n';
  }

  std::string endpoint_url_;
  RemoteOptions options_;
  std::counting_semaphore<64> in_flight_;
  std::mutex cache_mutex_;
  std::map<std::string, std::string> cache_;
  std::atomic<std::size_t> http_requests_{0};
};

}  // namespace kgforge::catalog
