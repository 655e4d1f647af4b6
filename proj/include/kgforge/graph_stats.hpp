// Shared statistics structs: produced by the stats module, consumed by VoID
// emission and the reports.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace kgforge::stats {

struct LinksetStat {
  std::string target_name;         // e.g. "semopenalex"
  std::string target_dataset_iri;  // e.g. "https://semopenalex.org/"
  std::string predicate_iri;
  std::size_t count = 0;
};

struct GraphStats {
  std::size_t triple_count = 0;
  std::map<std::string, std::size_t> per_class;  // class local name -> instances
  std::size_t papers_with_evaluations = 0;
  std::vector<LinksetStat> linksets;
};

struct MetricHistogram {
  std::string conference;
  bool found = true;
  // (metric name, count) sorted by count desc, name asc
  std::vector<std::pair<std::string, std::size_t>> bins;
};

}  // namespace kgforge::stats
