// Error types shared across the kgforge modules.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgforge {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class EmptySlugError : public Error {
 public:
  explicit EmptySlugError(const std::string& original)
      : Error("slug normalizes to the empty string: \"" + original + "\"") {}
};

class EmptyTitleError : public Error {
 public:
  EmptyTitleError() : Error("title is empty after normalization") {}
};

class MalformedJsonError : public Error {
 public:
  MalformedJsonError(std::size_t byte_offset, const std::string& detail)
      : Error("malformed JSON at byte " + std::to_string(byte_offset) + ": " + detail),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class WrongShapeError : public Error {
 public:
  explicit WrongShapeError(const std::string& detail)
      : Error("unexpected top-level JSON shape: " + detail) {}
};

class CycleDetectedError : public Error {
 public:
  explicit CycleDetectedError(const std::string& table_id)
      : Error("evaluation table id repeats along one path: " + table_id), table_id_(table_id) {}
  const std::string& table_id() const { return table_id_; }

 private:
  std::string table_id_;
};

class CatalogUnavailableError : public Error {
 public:
  explicit CatalogUnavailableError(const std::string& detail)
      : Error("catalog unavailable: " + detail) {}
};

class UnknownPaperError : public Error {
 public:
  explicit UnknownPaperError(const std::string& paper_iri)
      : Error("link decision references a paper absent from the graph: " + paper_iri) {}
};

class SinkWriteError : public Error {
 public:
  explicit SinkWriteError(const std::string& detail) : Error("write failed: " + detail) {}
};

class TooSmallError : public Error {
 public:
  explicit TooSmallError(std::size_t n)
      : Error("too few triples to split: " + std::to_string(n)) {}
};

class DivergedError : public Error {
 public:
  explicit DivergedError(int epoch)
      : Error("training diverged (non-finite parameter) at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class RegistryError : public Error {
 public:
  explicit RegistryError(const std::string& detail) : Error("registry: " + detail) {}
};

class UriCollisionError : public Error {
 public:
  explicit UriCollisionError(const std::string& iri)
      : Error("distinct inputs minted the same IRI: " + iri) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& detail) : Error("config: " + detail) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& detail) : Error("i/o: " + detail) {}
};

}  // namespace kgforge
