// Text normalization shared by RDF emission and the linker: markdown-to-plain
// conversion, name/title normalization, title variant generation, and
// normalized-Levenshtein similarity.
#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/errors.hpp"
#include "kgforge/unicode.hpp"

namespace kgforge::textnorm {

struct NormalizedString {
  std::string value;   // NFC, lowercase, punctuation stripped, spaces collapsed
  std::string source;  // original input
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// One rewrite pass over a single line: inline code, images, links, emphasis.
// Every rule strictly shortens the text it touches, so iterating to a fixed
// point terminates.
inline std::string strip_inline_once(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size();) {
    char c = line[i];
    // inline code span: `code` (single backticks only; dump descriptions do
    // not use the multi-backtick form)
    if (c == '`') {
      std::size_t close = line.find('`', i + 1);
      if (close != std::string_view::npos) {
        out.append(line.substr(i + 1, close - i - 1));
        i = close + 1;
        continue;
      }
    }
    // image: ![alt](url) -> alt
    if (c == '!' && i + 1 < line.size() && line[i + 1] == '[') {
      std::size_t close_bracket = line.find(']', i + 2);
      if (close_bracket != std::string_view::npos && close_bracket + 1 < line.size() &&
          line[close_bracket + 1] == '(') {
        std::size_t close_paren = line.find(')', close_bracket + 2);
        if (close_paren != std::string_view::npos) {
          out.append(line.substr(i + 2, close_bracket - i - 2));
          i = close_paren + 1;
          continue;
        }
      }
    }
    // link: [label](url) -> label
    if (c == '[') {
      std::size_t close_bracket = line.find(']', i + 1);
      if (close_bracket != std::string_view::npos && close_bracket + 1 < line.size() &&
          line[close_bracket + 1] == '(') {
        std::size_t close_paren = line.find(')', close_bracket + 2);
        if (close_paren != std::string_view::npos) {
          out.append(line.substr(i + 1, close_bracket - i - 1));
          i = close_paren + 1;
          continue;
        }
      }
    }
    // emphasis: **x** / __x__ / *x* / _x_ -> x (marker pair dropped, matched
    // by identical run length; unmatched runs pass through)
    if (c == '*' || c == '_') {
      std::size_t run = 1;
      while (i + run < line.size() && line[i + run] == c) ++run;
      if (run <= 3) {
        std::string marker(run, c);
        std::size_t close = line.find(marker, i + run);
        if (close != std::string_view::npos && close > i + run) {
          out.append(line.substr(i + run, close - i - run));
          i = close + run;
          continue;
        }
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

inline std::string strip_line_prefix(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  const std::size_t indent = i;
  // heading: one or more '#' followed by a space
  if (i < line.size() && line[i] == '#') {
    std::size_t j = i;
    while (j < line.size() && line[j] == '#') ++j;
    if (j < line.size() && line[j] == ' ') return std::string(line.substr(j + 1));
    if (j == line.size()) return std::string(line.substr(0, indent));
  }
  // blockquote: run of '>' markers
  if (i < line.size() && line[i] == '>') {
    std::size_t j = i;
    while (j < line.size() && (line[j] == '>' || line[j] == ' ')) ++j;
    return std::string(line.substr(0, indent)) + std::string(line.substr(j));
  }
  // unordered list bullet
  if (i + 1 < line.size() && (line[i] == '-' || line[i] == '*' || line[i] == '+') &&
      line[i + 1] == ' ') {
    return std::string(line.substr(0, indent)) + std::string(line.substr(i + 2));
  }
  // ordered list marker: digits then '.' or ')' then space
  std::size_t j = i;
  while (j < line.size() && line[j] >= '0' && line[j] <= '9') ++j;
  if (j > i && j + 1 < line.size() && (line[j] == '.' || line[j] == ')') && line[j + 1] == ' ') {
    return std::string(line.substr(0, indent)) + std::string(line.substr(j + 2));
  }
  return std::string(line);
}

inline bool is_fence(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return line.substr(i, 3) == "```" || line.substr(i, 3) == "~~~";
}

inline std::string strip_markdown_once(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  bool wrote_line = false;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = (eol == std::string_view::npos) ? text.substr(pos)
                                                            : text.substr(pos, eol - pos);
    if (is_fence(line)) {
      // Drop the fence marker line together with its newline; the fenced
      // content itself flows through as ordinary lines.
    } else {
      if (wrote_line) out.push_back('\n');
      out.append(strip_inline_once(strip_line_prefix(line)));
      wrote_line = true;
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

}  // namespace detail

// Converts the markdown subset used by the dump descriptions (emphasis, inline
// code, links, images, headings, bullets, blockquotes, fences) to plain text.
// Runs to a fixed point, so the result is idempotent even on adversarial
// input; it never fails.
inline std::string strip_markdown(std::string_view text) {
  std::string current(text);
  for (int round = 0; round < 16; ++round) {
    std::string next = detail::strip_markdown_once(current);
    if (next == current) return current;
    current = std::move(next);
  }
  return current;
}

namespace detail {

inline bool is_ascii_punct(char32_t cp) {
  return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') || (cp >= '[' && cp <= '`') ||
         (cp >= '{' && cp <= '~');
}

inline bool is_stripped_unicode_punct(char32_t cp) {
  switch (cp) {
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014: case 0x2015:  // dashes
    case 0x2018: case 0x2019: case 0x201A: case 0x201C: case 0x201D: case 0x201E:  // quotes
    case 0x2026:                                                                   // ellipsis
    case 0x00A1: case 0x00BF: case 0x00AB: case 0x00BB:
      return true;
    default:
      return false;
  }
}

inline bool is_alnum_cp(char32_t cp) {
  if (cp & unicode::kInvalidByteFlag) return false;
  if (cp < 0x80) return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
                        (cp >= 'A' && cp <= 'Z');
  return !unicode::is_combining_mark(cp) && !is_stripped_unicode_punct(cp);
}

}  // namespace detail

// NFC, lowercase, punctuation stripped, whitespace collapsed, trimmed.
// Intra-word hyphens survive ("pre-training"); apostrophes are dropped
// without a gap; other punctuation acts as a word separator. Diacritics are
// preserved; the linker's optional ASCII folding happens elsewhere.
inline NormalizedString normalize(std::string_view text) {
  std::string folded = unicode::lowercase(unicode::nfc(text));
  std::vector<char32_t> cps = unicode::decode_all(folded);
  std::string value;
  value.reserve(folded.size());
  bool pending_space = false;
  auto emit = [&](char32_t cp) {
    if (pending_space && !value.empty()) value.push_back(' ');
    pending_space = false;
    unicode::encode(cp, value);
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    char32_t cp = cps[i];
    if (cp == ' ' || cp == '\t' || cp == '\r' || cp == '\n' || cp == 0x00A0) {
      pending_space = true;
      continue;
    }
    if (cp == '\'' || cp == 0x2019) continue;  // apostrophes close the gap
    if (cp == '-') {
      const bool prev_ok = !value.empty() && !pending_space && i > 0 && detail::is_alnum_cp(cps[i - 1]);
      const bool next_ok = i + 1 < cps.size() && detail::is_alnum_cp(cps[i + 1]);
      if (prev_ok && next_ok) {
        emit(cp);
      } else {
        pending_space = true;
      }
      continue;
    }
    if (detail::is_ascii_punct(cp) || detail::is_stripped_unicode_punct(cp)) {
      pending_space = true;
      continue;
    }
    emit(cp);
  }
  return NormalizedString{std::move(value), std::string(text)};
}

// Ordered, deduplicated search variants of a paper title:
//   1. normalized title
//   2. subtitle after the first ':' dropped
//   3. bracketed/parenthesized spans removed
//   4. both reductions combined
inline std::vector<std::string> title_variants(std::string_view title) {
  const std::string base = normalize(title).value;
  if (base.empty()) throw EmptyTitleError();

  auto drop_subtitle = [](std::string_view t) -> std::string {
    std::size_t colon = t.find(':');
    return std::string(colon == std::string_view::npos ? t : t.substr(0, colon));
  };
  auto drop_brackets = [](std::string_view t) -> std::string {
    std::string out;
    out.reserve(t.size());
    int paren = 0, bracket = 0;
    for (char c : t) {
      if (c == '(') ++paren;
      else if (c == ')' && paren > 0) --paren;
      else if (c == '[') ++bracket;
      else if (c == ']' && bracket > 0) --bracket;
      else if (paren == 0 && bracket == 0) out.push_back(c);
    }
    return out;
  };

  std::vector<std::string> variants{base};
  auto push = [&](const std::string& raw) {
    std::string v = normalize(raw).value;
    if (v.empty()) return;
    if (std::find(variants.begin(), variants.end(), v) == variants.end()) variants.push_back(v);
  };
  const std::string t(title);
  push(drop_subtitle(t));
  push(drop_brackets(t));
  push(drop_brackets(drop_subtitle(t)));
  return variants;
}

// Levenshtein distance over codepoints, two-row DP.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<char32_t> ca = unicode::decode_all(a);
  std::vector<char32_t> cb = unicode::decode_all(b);
  if (ca.size() < cb.size()) std::swap(ca, cb);
  std::vector<std::size_t> prev(cb.size() + 1), cur(cb.size() + 1);
  for (std::size_t j = 0; j <= cb.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ca.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= cb.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (ca[i - 1] == cb[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[cb.size()];
}

// 1 - distance/max(len); 1.0 for two empty strings. Inputs are expected to be
// normalized already.
inline double fuzzy_similarity(std::string_view a, std::string_view b) {
  const std::size_t la = unicode::length(a);
  const std::size_t lb = unicode::length(b);
  const std::size_t longest = std::max(la, lb);
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

}  // namespace kgforge::textnorm
