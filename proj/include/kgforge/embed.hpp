// Knowledge-graph embeddings over the built graph's entity-to-entity links.
// Four scoring techniques (TransE, DistMult, ComplEx, RotatE) trained with
// plain SGD, negative sampling, and mean-rank early stopping. Training and
// the gradient used by it share one code path (pair_gradient) so the finite-
// difference tests exercise exactly what the optimizer applies.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kgforge/errors.hpp"
#include "kgforge/ontology.hpp"
#include "kgforge/rdf.hpp"

namespace kgforge::embed {

enum class Technique { TransE, DistMult, ComplEx, RotatE };

// ComplEx and RotatE keep complex-valued tables: each row stores the real
// plane followed by the imaginary plane.
inline bool is_complex_technique(Technique t) {
  return t == Technique::ComplEx || t == Technique::RotatE;
}

inline std::string technique_name(Technique t) {
  switch (t) {
    case Technique::TransE: return "transe";
    case Technique::DistMult: return "distmult";
    case Technique::ComplEx: return "complex";
    case Technique::RotatE: return "rotate";
  }
  return "unknown";
}

inline std::optional<Technique> technique_from_name(std::string_view name) {
  std::string folded;
  for (char c : name) folded.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
  if (folded == "transe") return Technique::TransE;
  if (folded == "distmult") return Technique::DistMult;
  if (folded == "complex") return Technique::ComplEx;
  if (folded == "rotate") return Technique::RotatE;
  return std::nullopt;
}

struct KgTripleId {
  std::uint32_t head = 0;
  std::uint32_t relation = 0;
  std::uint32_t tail = 0;

  bool operator==(const KgTripleId& o) const {
    return head == o.head && relation == o.relation && tail == o.tail;
  }
  bool operator<(const KgTripleId& o) const {
    if (head != o.head) return head < o.head;
    if (relation != o.relation) return relation < o.relation;
    return tail < o.tail;
  }
};

struct KgTripleIdHash {
  std::size_t operator()(const KgTripleId& t) const {
    std::uint64_t x = (std::uint64_t(t.head) << 40) ^ (std::uint64_t(t.relation) << 20) ^
                      std::uint64_t(t.tail);
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

using PositiveSet = std::unordered_set<KgTripleId, KgTripleIdHash>;

struct Dictionaries {
  std::vector<std::string> entities;   // index -> IRI
  std::vector<std::string> relations;  // index -> predicate IRI
  std::unordered_map<std::string, std::uint32_t> entity_ids;
  std::unordered_map<std::string, std::uint32_t> relation_ids;
};

struct IndexedGraph {
  Dictionaries dicts;
  std::vector<KgTripleId> triples;
};

// Indexes the graph's link structure. Only triples whose predicate is one of
// the schema's object properties participate: literals carry no pairwise link
// and typing/sameAs statements are bookkeeping, not structure. Indices are
// assigned in lexicographic triple order, so they are a pure function of the
// triple set.
inline IndexedGraph index_graph(const rdf::GraphBuffer& graph,
                                const ontology::Registry& registry) {
  std::set<std::string> object_props;
  for (const ontology::PropertyDescriptor& p : registry.properties()) {
    if (p.kind == ontology::PropertyKind::Object) object_props.insert(p.uri);
  }
  std::vector<std::array<std::string, 3>> rows;
  for (const rdf::Triple& t : graph) {
    if (!t.object.is_iri()) continue;
    if (!object_props.count(t.predicate.value())) continue;
    rows.push_back({t.subject.value(), t.predicate.value(), t.object.value()});
  }
  std::sort(rows.begin(), rows.end());

  IndexedGraph out;
  auto entity_id = [&out](const std::string& iri) {
    auto [it, fresh] = out.dicts.entity_ids.emplace(
        iri, static_cast<std::uint32_t>(out.dicts.entities.size()));
    if (fresh) out.dicts.entities.push_back(iri);
    return it->second;
  };
  auto relation_id = [&out](const std::string& iri) {
    auto [it, fresh] = out.dicts.relation_ids.emplace(
        iri, static_cast<std::uint32_t>(out.dicts.relations.size()));
    if (fresh) out.dicts.relations.push_back(iri);
    return it->second;
  };
  for (const auto& row : rows) {
    KgTripleId id;
    id.head = entity_id(row[0]);
    id.relation = relation_id(row[1]);
    id.tail = entity_id(row[2]);
    out.triples.push_back(id);
  }
  return out;
}

struct EmbeddingModel {
  Technique technique = Technique::TransE;
  std::size_t dim = 100;
  std::uint64_t seed = 42;
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  std::vector<double> entity_data;
  std::vector<double> relation_data;

  std::size_t width() const { return is_complex_technique(technique) ? 2 * dim : dim; }
  double* entity(std::size_t i) { return entity_data.data() + i * width(); }
  const double* entity(std::size_t i) const { return entity_data.data() + i * width(); }
  double* relation(std::size_t i) { return relation_data.data() + i * width(); }
  const double* relation(std::size_t i) const { return relation_data.data() + i * width(); }

  bool all_finite() const {
    for (double v : entity_data) {
      if (!std::isfinite(v)) return false;
    }
    for (double v : relation_data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

namespace detail {

// Deterministic across standard libraries, unlike std::shuffle.
template <class T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng() % i]);
  }
}

inline void normalize_l2(double* row, std::size_t n) {
  double sq = 0;
  for (std::size_t i = 0; i < n; ++i) sq += row[i] * row[i];
  const double norm = std::sqrt(sq);
  if (norm < 1e-12) return;
  for (std::size_t i = 0; i < n; ++i) row[i] /= norm;
}

// Forces every complex element of a RotatE relation row onto the unit circle.
inline void normalize_unit_modulus(double* row, std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i) {
    const double re = row[i];
    const double im = row[dim + i];
    const double mod = std::sqrt(re * re + im * im);
    if (mod < 1e-12) {
      row[i] = 1.0;
      row[dim + i] = 0.0;
    } else {
      row[i] = re / mod;
      row[dim + i] = im / mod;
    }
  }
}

inline double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0) {
    const double z = std::exp(-x);
    return 1.0 / (1.0 + z);
  }
  const double z = std::exp(x);
  return z / (1.0 + z);
}

inline double score_vectors(Technique tech, std::size_t d, const double* h, const double* r,
                            const double* t) {
  switch (tech) {
    case Technique::TransE: {
      double sq = 0;
      for (std::size_t i = 0; i < d; ++i) {
        const double v = h[i] + r[i] - t[i];
        sq += v * v;
      }
      return -std::sqrt(sq);
    }
    case Technique::DistMult: {
      // Multiply the entity pair first: h*t commutes exactly in IEEE
      // arithmetic, so swapping head and tail gives a bitwise-equal score.
      double s = 0;
      for (std::size_t i = 0; i < d; ++i) s += h[i] * t[i] * r[i];
      return s;
    }
    case Technique::ComplEx: {
      // Re(sum h_i r_i conj(t_i)) with planes h=(a,b), r=(c,e), t=(f,g).
      double s = 0;
      for (std::size_t i = 0; i < d; ++i) {
        const double a = h[i], b = h[d + i];
        const double c = r[i], e = r[d + i];
        const double f = t[i], g = t[d + i];
        s += a * c * f + b * c * g + a * e * g - b * e * f;
      }
      return s;
    }
    case Technique::RotatE: {
      double sq = 0;
      for (std::size_t i = 0; i < d; ++i) {
        const double ure = h[i] * r[i] - h[d + i] * r[d + i] - t[i];
        const double uim = h[i] * r[d + i] + h[d + i] * r[i] - t[d + i];
        sq += ure * ure + uim * uim;
      }
      return -std::sqrt(sq);
    }
  }
  return 0;
}

}  // namespace detail

inline double score(const EmbeddingModel& m, std::size_t h, std::size_t r, std::size_t t) {
  return detail::score_vectors(m.technique, m.dim, m.entity(h), m.relation(r), m.entity(t));
}

inline EmbeddingModel init_model(Technique tech, std::size_t dim, std::size_t entities,
                                 std::size_t relations, std::uint64_t seed) {
  EmbeddingModel m;
  m.technique = tech;
  m.dim = dim;
  m.seed = seed;
  m.entity_count = entities;
  m.relation_count = relations;
  m.entity_data.resize(entities * m.width());
  m.relation_data.resize(relations * m.width());

  std::mt19937_64 rng(seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  auto uniform = [&rng, bound]() {
    // 53-bit mantissa draw; avoids unspecified distribution internals.
    const double unit = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    return (2.0 * unit - 1.0) * bound;
  };
  for (double& v : m.entity_data) v = uniform();
  for (double& v : m.relation_data) v = uniform();

  if (tech == Technique::TransE) {
    for (std::size_t i = 0; i < entities; ++i) detail::normalize_l2(m.entity(i), m.width());
  }
  if (tech == Technique::RotatE) {
    for (std::size_t i = 0; i < relations; ++i) {
      double* row = m.relation(i);
      for (std::size_t j = 0; j < dim; ++j) {
        const double unit = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
        const double phase = (2.0 * unit - 1.0) * 3.14159265358979323846;
        row[j] = std::cos(phase);
        row[dim + j] = std::sin(phase);
      }
    }
  }
  return m;
}

struct TrainConfig {
  std::size_t max_epochs = 900;
  std::size_t eval_interval = 300;
  std::size_t dim = 100;
  double margin = 1.0;         // margin-ranking techniques only
  double learning_rate = 0.01;
  std::size_t negatives = 8;   // negatives per positive
  std::size_t batch_size = 1024;
  std::uint64_t seed = 42;
  double train_ratio = 0.9;
  double valid_ratio = 0.05;
  double test_ratio = 0.05;
  int patience = 1;            // checkpoints allowed to worsen before stopping
  bool deterministic = true;   // sequential updates; false = unsynchronized parallel
  std::size_t workers = 4;     // only used when deterministic == false

  void validate() const {
    if (max_epochs == 0 || eval_interval == 0 || max_epochs % eval_interval != 0) {
      throw ConfigError("eval interval must divide max epochs");
    }
    if (std::abs(train_ratio + valid_ratio + test_ratio - 1.0) > 1e-9) {
      throw ConfigError("split ratios must sum to 1");
    }
    if (dim == 0 || batch_size == 0 || negatives == 0) {
      throw ConfigError("dim, batch size, and negatives must be positive");
    }
    if (patience < 1) throw ConfigError("patience must be at least 1");
  }
};

struct Split {
  std::vector<KgTripleId> train;
  std::vector<KgTripleId> valid;
  std::vector<KgTripleId> test;
};

// Seeded shuffle split. Entities and relations that valid/test triples would
// otherwise see first are pulled back into train so every index is trained.
inline Split build_split(std::vector<KgTripleId> triples, const TrainConfig& cfg) {
  cfg.validate();
  if (triples.size() < 10) throw TooSmallError(triples.size());
  std::mt19937_64 rng(cfg.seed);
  detail::fisher_yates(triples, rng);

  const std::size_t n = triples.size();
  const auto n_valid = static_cast<std::size_t>(std::llround(cfg.valid_ratio * n));
  const auto n_test = static_cast<std::size_t>(std::llround(cfg.test_ratio * n));
  const std::size_t n_train = n - n_valid - n_test;

  Split split;
  split.train.assign(triples.begin(), triples.begin() + n_train);
  std::vector<KgTripleId> rest_valid(triples.begin() + n_train,
                                     triples.begin() + n_train + n_valid);
  std::vector<KgTripleId> rest_test(triples.begin() + n_train + n_valid, triples.end());

  std::unordered_set<std::uint32_t> seen_entities;
  std::unordered_set<std::uint32_t> seen_relations;
  for (const KgTripleId& t : split.train) {
    seen_entities.insert(t.head);
    seen_entities.insert(t.tail);
    seen_relations.insert(t.relation);
  }
  auto place = [&](std::vector<KgTripleId>& from, std::vector<KgTripleId>& into) {
    for (const KgTripleId& t : from) {
      const bool covered = seen_entities.count(t.head) && seen_entities.count(t.tail) &&
                           seen_relations.count(t.relation);
      if (covered) {
        into.push_back(t);
      } else {
        split.train.push_back(t);
        seen_entities.insert(t.head);
        seen_entities.insert(t.tail);
        seen_relations.insert(t.relation);
      }
    }
  };
  std::vector<KgTripleId> valid_kept;
  std::vector<KgTripleId> test_kept;
  place(rest_valid, valid_kept);
  place(rest_test, test_kept);
  split.valid = std::move(valid_kept);
  split.test = std::move(test_kept);
  return split;
}

inline std::vector<KgTripleId> negative_sample(const KgTripleId& positive, std::size_t n,
                                               std::size_t entity_count, std::mt19937_64& rng,
                                               const PositiveSet& known) {
  std::vector<KgTripleId> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    KgTripleId neg = positive;
    for (int attempt = 0; attempt < 100; ++attempt) {
      neg = positive;
      const bool corrupt_head = (rng() & 1) != 0;
      const auto candidate = static_cast<std::uint32_t>(rng() % entity_count);
      (corrupt_head ? neg.head : neg.tail) = candidate;
      if (!known.count(neg)) break;
      // collision with a known positive: resample (kept unfiltered after 100)
    }
    out.push_back(neg);
  }
  return out;
}

// One (positive, negative) pair: loss value plus dLoss/dRow for every touched
// table row. Margin ranking for TransE/RotatE, binary softplus for
// DistMult/ComplEx.
struct RowGradient {
  bool is_entity = true;
  std::uint32_t index = 0;
  std::vector<double> grad;
};

struct PairGradient {
  double loss = 0;
  std::vector<RowGradient> rows;

  std::vector<double>& row(bool is_entity, std::uint32_t index, std::size_t width) {
    for (RowGradient& r : rows) {
      if (r.is_entity == is_entity && r.index == index) return r.grad;
    }
    rows.push_back({is_entity, index, std::vector<double>(width, 0.0)});
    return rows.back().grad;
  }
};

namespace detail {

// Adds scale * d(score)/d(row) for the given triple into `out`.
inline void accumulate_score_gradient(const EmbeddingModel& m, const KgTripleId& t,
                                      double scale, PairGradient& out) {
  const std::size_t d = m.dim;
  const std::size_t w = m.width();
  const double* h = m.entity(t.head);
  const double* r = m.relation(t.relation);
  const double* tt = m.entity(t.tail);
  // Materialize all three rows before taking references: row() may grow the
  // vector, which would invalidate references taken across calls.
  out.row(true, t.head, w);
  out.row(false, t.relation, w);
  out.row(true, t.tail, w);
  std::vector<double>& gh = out.row(true, t.head, w);
  std::vector<double>& gr = out.row(false, t.relation, w);
  std::vector<double>& gt = out.row(true, t.tail, w);

  switch (m.technique) {
    case Technique::TransE: {
      double sq = 0;
      for (std::size_t i = 0; i < d; ++i) {
        const double v = h[i] + r[i] - tt[i];
        sq += v * v;
      }
      const double norm = std::sqrt(sq);
      if (norm < 1e-12) return;  // score is flat at the origin
      for (std::size_t i = 0; i < d; ++i) {
        const double g = scale * -(h[i] + r[i] - tt[i]) / norm;
        gh[i] += g;
        gr[i] += g;
        gt[i] -= g;
      }
      return;
    }
    case Technique::DistMult: {
      for (std::size_t i = 0; i < d; ++i) {
        gh[i] += scale * r[i] * tt[i];
        gr[i] += scale * h[i] * tt[i];
        gt[i] += scale * h[i] * r[i];
      }
      return;
    }
    case Technique::ComplEx: {
      for (std::size_t i = 0; i < d; ++i) {
        const double a = h[i], b = h[d + i];
        const double c = r[i], e = r[d + i];
        const double f = tt[i], g = tt[d + i];
        gh[i] += scale * (c * f + e * g);
        gh[d + i] += scale * (c * g - e * f);
        gr[i] += scale * (a * f + b * g);
        gr[d + i] += scale * (a * g - b * f);
        gt[i] += scale * (a * c - b * e);
        gt[d + i] += scale * (a * e + b * c);
      }
      return;
    }
    case Technique::RotatE: {
      double sq = 0;
      std::vector<double> ure(d), uim(d);
      for (std::size_t i = 0; i < d; ++i) {
        ure[i] = h[i] * r[i] - h[d + i] * r[d + i] - tt[i];
        uim[i] = h[i] * r[d + i] + h[d + i] * r[i] - tt[d + i];
        sq += ure[i] * ure[i] + uim[i] * uim[i];
      }
      const double norm = std::sqrt(sq);
      if (norm < 1e-12) return;
      for (std::size_t i = 0; i < d; ++i) {
        const double gre = scale * -ure[i] / norm;  // d(score)/d(u_re)
        const double gim = scale * -uim[i] / norm;
        gh[i] += gre * r[i] + gim * r[d + i];
        gh[d + i] += -gre * r[d + i] + gim * r[i];
        gr[i] += gre * h[i] + gim * h[d + i];
        gr[d + i] += -gre * h[d + i] + gim * h[i];
        gt[i] -= gre;
        gt[d + i] -= gim;
      }
      return;
    }
  }
}

}  // namespace detail

inline double pair_loss(const EmbeddingModel& m, const KgTripleId& pos, const KgTripleId& neg,
                        double margin) {
  const double s_pos = score(m, pos.head, pos.relation, pos.tail);
  const double s_neg = score(m, neg.head, neg.relation, neg.tail);
  switch (m.technique) {
    case Technique::TransE:
    case Technique::RotatE:
      return std::max(0.0, margin - s_pos + s_neg);
    case Technique::DistMult:
    case Technique::ComplEx:
      return detail::softplus(-s_pos) + detail::softplus(s_neg);
  }
  return 0;
}

inline PairGradient pair_gradient(const EmbeddingModel& m, const KgTripleId& pos,
                                  const KgTripleId& neg, double margin) {
  PairGradient out;
  const double s_pos = score(m, pos.head, pos.relation, pos.tail);
  const double s_neg = score(m, neg.head, neg.relation, neg.tail);
  switch (m.technique) {
    case Technique::TransE:
    case Technique::RotatE: {
      out.loss = margin - s_pos + s_neg;
      if (out.loss <= 0) {
        out.loss = 0;
        return out;  // hinge inactive: zero gradient
      }
      detail::accumulate_score_gradient(m, pos, -1.0, out);
      detail::accumulate_score_gradient(m, neg, +1.0, out);
      return out;
    }
    case Technique::DistMult:
    case Technique::ComplEx: {
      out.loss = detail::softplus(-s_pos) + detail::softplus(s_neg);
      detail::accumulate_score_gradient(m, pos, -detail::sigmoid(-s_pos), out);
      detail::accumulate_score_gradient(m, neg, detail::sigmoid(s_neg), out);
      return out;
    }
  }
  return out;
}

// Applies one SGD step for the pair; returns the pair loss.
inline double update_pair(EmbeddingModel& m, const KgTripleId& pos, const KgTripleId& neg,
                          double learning_rate, double margin) {
  PairGradient g = pair_gradient(m, pos, neg, margin);
  for (const RowGradient& row : g.rows) {
    double* p = row.is_entity ? m.entity(row.index) : m.relation(row.index);
    for (std::size_t i = 0; i < row.grad.size(); ++i) p[i] -= learning_rate * row.grad[i];
  }
  if (m.technique == Technique::RotatE) {
    for (const RowGradient& row : g.rows) {
      if (!row.is_entity) detail::normalize_unit_modulus(m.relation(row.index), m.dim);
    }
  }
  return g.loss;
}

struct CheckpointMetric {
  std::size_t epoch = 0;
  double validation_mean_rank = 0;
};

struct EvalReport {
  double mean_rank_raw = 0;
  double mean_rank_filtered = 0;
  double mrr = 0;
  double hits1 = 0;
  double hits3 = 0;
  double hits10 = 0;
  std::vector<CheckpointMetric> history;
};

// Ranks the true head and true tail of every eval triple against all
// entities. Ties count against the true entity; the filtered rank skips
// candidates that are known positives.
inline EvalReport evaluate(const EmbeddingModel& m, const std::vector<KgTripleId>& eval_triples,
                           const PositiveSet& known) {
  EvalReport r;
  if (eval_triples.empty() || m.entity_count == 0) return r;
  double sum_raw = 0, sum_filtered = 0, sum_rr = 0;
  std::size_t hits1 = 0, hits3 = 0, hits10 = 0, samples = 0;
  for (const KgTripleId& t : eval_triples) {
    const double s_true = score(m, t.head, t.relation, t.tail);
    for (int direction = 0; direction < 2; ++direction) {
      const std::uint32_t truth = direction == 0 ? t.tail : t.head;
      std::size_t raw = 1, filtered = 1;
      for (std::uint32_t c = 0; c < m.entity_count; ++c) {
        if (c == truth) continue;
        const double s = direction == 0 ? score(m, t.head, t.relation, c)
                                        : score(m, c, t.relation, t.tail);
        if (s >= s_true) {
          ++raw;
          KgTripleId candidate = t;
          (direction == 0 ? candidate.tail : candidate.head) = c;
          if (!known.count(candidate)) ++filtered;
        }
      }
      sum_raw += static_cast<double>(raw);
      sum_filtered += static_cast<double>(filtered);
      sum_rr += 1.0 / static_cast<double>(filtered);
      if (filtered <= 1) ++hits1;
      if (filtered <= 3) ++hits3;
      if (filtered <= 10) ++hits10;
      ++samples;
    }
  }
  const auto n = static_cast<double>(samples);
  r.mean_rank_raw = sum_raw / n;
  r.mean_rank_filtered = sum_filtered / n;
  r.mrr = sum_rr / n;
  r.hits1 = static_cast<double>(hits1) / n;
  r.hits3 = static_cast<double>(hits3) / n;
  r.hits10 = static_cast<double>(hits10) / n;
  return r;
}

struct EpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0;
};

struct TrainHooks {
  // Test seam: replaces the validation metric driving early stopping.
  std::function<double(const EmbeddingModel&, std::size_t epoch)> validation_metric;
};

struct TrainResult {
  EmbeddingModel model;
  EvalReport report;  // validation metrics of the returned snapshot
  std::vector<EpochLog> log;
  TrainConfig config;
  bool stopped_early = false;
  std::size_t returned_epoch = 0;
  bool deterministic = true;
};

namespace detail {

inline void run_epoch_sequential(EmbeddingModel& m, const std::vector<KgTripleId>& order,
                                 const PositiveSet& known, const TrainConfig& cfg,
                                 std::mt19937_64& rng, double& loss_sum,
                                 std::size_t& pair_count) {
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    for (std::size_t i = start; i < end; ++i) {
      const KgTripleId& pos = order[i];
      const std::vector<KgTripleId> negs =
          negative_sample(pos, cfg.negatives, m.entity_count, rng, known);
      for (const KgTripleId& neg : negs) {
        loss_sum += update_pair(m, pos, neg, cfg.learning_rate, cfg.margin);
        ++pair_count;
      }
    }
  }
}

// Unsynchronized data-parallel epoch: workers update the shared tables
// without locks, so results are not bitwise reproducible.
inline void run_epoch_parallel(EmbeddingModel& m, const std::vector<KgTripleId>& order,
                               const PositiveSet& known, const TrainConfig& cfg,
                               std::size_t epoch, double& loss_sum, std::size_t& pair_count) {
  const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
  std::vector<double> losses(workers, 0.0);
  std::vector<std::size_t> counts(workers, 0);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (epoch * workers + w + 1)));
      for (std::size_t i = w; i < order.size(); i += workers) {
        const KgTripleId& pos = order[i];
        const std::vector<KgTripleId> negs =
            negative_sample(pos, cfg.negatives, m.entity_count, rng, known);
        for (const KgTripleId& neg : negs) {
          losses[w] += update_pair(m, pos, neg, cfg.learning_rate, cfg.margin);
          ++counts[w];
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (std::size_t w = 0; w < workers; ++w) {
    loss_sum += losses[w];
    pair_count += counts[w];
  }
}

}  // namespace detail

// Trains one model: seeded split, SGD epochs, checkpoint every eval_interval
// epochs. A checkpoint whose validation mean rank is worse than the previous
// checkpoint's (patience consecutive times) stops training and returns the
// snapshot taken before the worsening streak.
inline TrainResult train(Technique technique, const std::vector<KgTripleId>& all_triples,
                         std::size_t entity_count, std::size_t relation_count,
                         const TrainConfig& cfg, const TrainHooks& hooks = {}) {
  cfg.validate();
  const Split split = build_split(all_triples, cfg);
  const PositiveSet known(all_triples.begin(), all_triples.end());

  TrainResult result;
  result.config = cfg;
  result.deterministic = cfg.deterministic;

  EmbeddingModel model = init_model(technique, cfg.dim, entity_count, relation_count, cfg.seed);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<KgTripleId> order = split.train;
  std::vector<CheckpointMetric> history;
  EmbeddingModel anchor = model;  // snapshot to return on early stop
  std::size_t anchor_epoch = 0;
  double previous_metric = 0;
  bool have_previous = false;
  int worsening_streak = 0;
  bool stopped = false;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    detail::fisher_yates(order, rng);
    double loss_sum = 0;
    std::size_t pair_count = 0;
    if (cfg.deterministic) {
      detail::run_epoch_sequential(model, order, known, cfg, rng, loss_sum, pair_count);
    } else {
      detail::run_epoch_parallel(model, order, known, cfg, epoch, loss_sum, pair_count);
    }
    if (technique == Technique::TransE) {
      for (std::size_t i = 0; i < model.entity_count; ++i) {
        detail::normalize_l2(model.entity(i), model.width());
      }
    }
    const double mean_loss = pair_count ? loss_sum / static_cast<double>(pair_count) : 0.0;
    result.log.push_back({epoch, mean_loss});
    if (!std::isfinite(mean_loss)) throw DivergedError(static_cast<int>(epoch));

    if (epoch % cfg.eval_interval != 0) continue;
    if (!model.all_finite()) throw DivergedError(static_cast<int>(epoch));
    const double metric = hooks.validation_metric
                              ? hooks.validation_metric(model, epoch)
                              : evaluate(model, split.valid, known).mean_rank_filtered;
    history.push_back({epoch, metric});
    if (have_previous && metric > previous_metric) {
      ++worsening_streak;
      if (worsening_streak >= cfg.patience) {
        result.model = anchor;
        result.returned_epoch = anchor_epoch;
        result.stopped_early = true;
        stopped = true;
        break;
      }
    } else {
      worsening_streak = 0;
      anchor = model;
      anchor_epoch = epoch;
    }
    previous_metric = metric;
    have_previous = true;
  }

  if (!stopped) {
    result.model = model;
    result.returned_epoch = cfg.max_epochs;
  }
  result.report = hooks.validation_metric
                      ? EvalReport{}
                      : evaluate(result.model, split.valid, known);
  result.report.history = history;
  return result;
}

enum class ExportTable { Entities, Relations };

// TSV: header line with provenance, then one row per IRI. Complex techniques
// write 2*dim value columns (real plane, then imaginary plane).
inline std::size_t export_table(const EmbeddingModel& m, const std::vector<std::string>& names,
                                ExportTable which, std::ostream& out) {
  const bool entities = which == ExportTable::Entities;
  const std::size_t count = entities ? m.entity_count : m.relation_count;
  if (names.size() != count) {
    throw ConfigError("dictionary size does not match the model table");
  }
  out << "# technique=" << technique_name(m.technique) << "\tdim=" << m.dim
      << "\tseed=" << m.seed << "\n";
  char buf[40];
  for (std::size_t i = 0; i < count; ++i) {
    out << names[i];
    const double* row = entities ? m.entity(i) : m.relation(i);
    for (std::size_t j = 0; j < m.width(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      out << '\t' << buf;
    }
    out << '\n';
    if (!out) throw SinkWriteError("embedding table row " + std::to_string(i));
  }
  if (!out) throw SinkWriteError("embedding table");
  return count;
}

}  // namespace kgforge::embed
