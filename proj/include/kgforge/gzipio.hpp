// gzip-aware stream wrappers over zlib. Output paths ending in .gz are
// compressed; input streams are sniffed by magic bytes.
#pragma once

#include <zlib.h>

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <streambuf>
#include <string>
#include <vector>

#include "kgforge/errors.hpp"

namespace kgforge::gzipio {

class GzipInputBuf : public std::streambuf {
 public:
  explicit GzipInputBuf(std::istream& source) : source_(source) {
    std::memset(&strm_, 0, sizeof(strm_));
    // windowBits 15+32: zlib and gzip auto-detection
    if (inflateInit2(&strm_, 15 + 32) != Z_OK) throw Error("inflateInit failed");
    setg(out_.data(), out_.data(), out_.data());
  }
  ~GzipInputBuf() override { inflateEnd(&strm_); }
  GzipInputBuf(const GzipInputBuf&) = delete;
  GzipInputBuf& operator=(const GzipInputBuf&) = delete;

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    if (finished_) return traits_type::eof();
    strm_.next_out = reinterpret_cast<Bytef*>(out_.data());
    strm_.avail_out = static_cast<uInt>(out_.size());
    while (strm_.avail_out == out_.size()) {
      if (strm_.avail_in == 0) {
        source_.read(in_.data(), static_cast<std::streamsize>(in_.size()));
        const auto got = source_.gcount();
        if (got <= 0) {
          if (strm_.avail_out == out_.size()) return traits_type::eof();
          break;
        }
        strm_.next_in = reinterpret_cast<Bytef*>(in_.data());
        strm_.avail_in = static_cast<uInt>(got);
      }
      const int rc = inflate(&strm_, Z_NO_FLUSH);
      if (rc == Z_STREAM_END) {
        finished_ = true;
        break;
      }
      if (rc != Z_OK && rc != Z_BUF_ERROR) {
        throw Error(std::string("gzip inflate failed: ") + (strm_.msg ? strm_.msg : "?"));
      }
      if (rc == Z_BUF_ERROR && strm_.avail_in == 0 && source_.eof()) break;
    }
    const std::size_t produced = out_.size() - strm_.avail_out;
    if (produced == 0) return traits_type::eof();
    setg(out_.data(), out_.data(), out_.data() + produced);
    return traits_type::to_int_type(*gptr());
  }

 private:
  std::istream& source_;
  z_stream strm_{};
  bool finished_ = false;
  std::array<char, 1 << 15> in_{};
  std::array<char, 1 << 15> out_{};
};

class GzipOutputBuf : public std::streambuf {
 public:
  explicit GzipOutputBuf(std::ostream& sink) : sink_(sink) {
    std::memset(&strm_, 0, sizeof(strm_));
    // windowBits 15+16: gzip container
    if (deflateInit2(&strm_, Z_BEST_SPEED, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
      throw Error("deflateInit failed");
    }
    setp(in_.data(), in_.data() + in_.size());
  }
  ~GzipOutputBuf() override {
    try {
      finish();
    } catch (...) {
    }
    deflateEnd(&strm_);
  }
  GzipOutputBuf(const GzipOutputBuf&) = delete;
  GzipOutputBuf& operator=(const GzipOutputBuf&) = delete;

  void finish() {
    if (finished_) return;
    drain(Z_FINISH);
    finished_ = true;
    sink_.flush();
  }

 protected:
  int_type overflow(int_type ch) override {
    drain(Z_NO_FLUSH);
    if (ch != traits_type::eof()) {
      *pptr() = traits_type::to_char_type(ch);
      pbump(1);
    }
    return 0;
  }
  int sync() override {
    drain(Z_NO_FLUSH);
    sink_.flush();
    return sink_ ? 0 : -1;
  }

 private:
  void drain(int flush) {
    strm_.next_in = reinterpret_cast<Bytef*>(pbase());
    strm_.avail_in = static_cast<uInt>(pptr() - pbase());
    do {
      strm_.next_out = reinterpret_cast<Bytef*>(out_.data());
      strm_.avail_out = static_cast<uInt>(out_.size());
      const int rc = deflate(&strm_, flush);
      if (rc == Z_STREAM_ERROR) throw SinkWriteError("gzip deflate failed");
      const std::size_t produced = out_.size() - strm_.avail_out;
      if (produced > 0) {
        sink_.write(out_.data(), static_cast<std::streamsize>(produced));
        if (!sink_) throw SinkWriteError("gzip sink write failed");
      }
      if (rc == Z_STREAM_END) break;
    } while (strm_.avail_out == 0 || strm_.avail_in > 0);
    setp(in_.data(), in_.data() + in_.size());
  }

  std::ostream& sink_;
  z_stream strm_{};
  bool finished_ = false;
  std::array<char, 1 << 15> in_{};
  std::array<char, 1 << 15> out_{};
};

// Owns the file stream plus an optional inflating wrapper.
class InputFile {
 public:
  explicit InputFile(const std::string& path) : file_(path, std::ios::binary) {
    if (!file_) throw Error("cannot open input file: " + path);
    int c0 = file_.get();
    int c1 = file_.peek();
    file_.unget();
    if (c0 == 0x1F && c1 == 0x8B) {
      buf_ = std::make_unique<GzipInputBuf>(file_);
      stream_ = std::make_unique<std::istream>(buf_.get());
    }
  }
  std::istream& stream() { return stream_ ? *stream_ : file_; }

 private:
  std::ifstream file_;
  std::unique_ptr<GzipInputBuf> buf_;
  std::unique_ptr<std::istream> stream_;
};

class OutputFile {
 public:
  explicit OutputFile(const std::string& path)
      : gz_(path.size() > 3 && path.substr(path.size() - 3) == ".gz"),
        file_(path, std::ios::binary | std::ios::trunc) {
    if (!file_) throw SinkWriteError("cannot open output file: " + path);
    if (gz_) {
      buf_ = std::make_unique<GzipOutputBuf>(file_);
      stream_ = std::make_unique<std::ostream>(buf_.get());
    }
  }
  std::ostream& stream() { return stream_ ? *stream_ : file_; }
  void close() {
    if (buf_) buf_->finish();
    file_.close();
    if (!file_ && !file_.eof()) throw SinkWriteError("close failed");
  }

 private:
  bool gz_;
  std::ofstream file_;
  std::unique_ptr<GzipOutputBuf> buf_;
  std::unique_ptr<std::ostream> stream_;
};

}  // namespace kgforge::gzipio
