// Small UTF-8 toolbox: codepoint iteration, case folding and canonical
// composition for the Latin ranges the upstream dumps actually contain.
// Codepoints outside the tables pass through unchanged; invalid bytes are
// copied verbatim so normalization never fails.
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kgforge::unicode {

inline constexpr char32_t kInvalidByteFlag = 0x8000'0000u;

struct Decoded {
  char32_t cp;       // codepoint, or (kInvalidByteFlag | byte) for bad input
  std::size_t size;  // bytes consumed, >= 1
};

inline Decoded decode(std::string_view s, std::size_t pos) {
  const auto byte = [&](std::size_t i) -> std::uint8_t {
    return static_cast<std::uint8_t>(s[i]);
  };
  const std::uint8_t b0 = byte(pos);
  if (b0 < 0x80) return {b0, 1};
  auto bad = [&]() -> Decoded { return {kInvalidByteFlag | b0, 1}; };
  auto cont = [&](std::size_t i) {
    return pos + i < s.size() && (byte(pos + i) & 0xC0) == 0x80;
  };
  if ((b0 & 0xE0) == 0xC0) {
    if (!cont(1)) return bad();
    char32_t cp = (char32_t(b0 & 0x1F) << 6) | (byte(pos + 1) & 0x3F);
    if (cp < 0x80) return bad();  // overlong
    return {cp, 2};
  }
  if ((b0 & 0xF0) == 0xE0) {
    if (!cont(1) || !cont(2)) return bad();
    char32_t cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(byte(pos + 1) & 0x3F) << 6) |
                  (byte(pos + 2) & 0x3F);
    if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return bad();
    return {cp, 3};
  }
  if ((b0 & 0xF8) == 0xF0) {
    if (!cont(1) || !cont(2) || !cont(3)) return bad();
    char32_t cp = (char32_t(b0 & 0x07) << 18) | (char32_t(byte(pos + 1) & 0x3F) << 12) |
                  (char32_t(byte(pos + 2) & 0x3F) << 6) | (byte(pos + 3) & 0x3F);
    if (cp < 0x10000 || cp > 0x10FFFF) return bad();
    return {cp, 4};
  }
  return bad();
}

inline void encode(char32_t cp, std::string& out) {
  if (cp & kInvalidByteFlag) {
    out.push_back(static_cast<char>(cp & 0xFF));
  } else if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::vector<char32_t> decode_all(std::string_view s) {
  std::vector<char32_t> cps;
  cps.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    Decoded d = decode(s, i);
    cps.push_back(d.cp);
    i += d.size;
  }
  return cps;
}

inline std::string encode_all(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) encode(cp, out);
  return out;
}

inline char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
  if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;  // Latin Ext-A
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;  // Y with diaeresis
  if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;  // Greek
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;                 // Cyrillic
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

namespace detail {

struct ComposePair {
  char32_t key;  // base << 12 | (combining mark - 0x300)
  char32_t composed;
};

constexpr char32_t ck(char32_t base, char32_t mark) { return (base << 12) | (mark - 0x300); }

// Canonical (base, combining mark) -> precomposed codepoint, covering the
// Latin-1 Supplement and Latin Extended-A composition exclusions' complement.
inline const std::vector<ComposePair>& compose_table() {
  static const std::vector<ComposePair> table = [] {
    std::vector<ComposePair> t = {
        {ck('A', 0x300), 0xC0},  {ck('A', 0x301), 0xC1},  {ck('A', 0x302), 0xC2},
        {ck('A', 0x303), 0xC3},  {ck('A', 0x304), 0x100}, {ck('A', 0x306), 0x102},
        {ck('A', 0x308), 0xC4},  {ck('A', 0x30A), 0xC5},  {ck('A', 0x328), 0x104},
        {ck('C', 0x301), 0x106}, {ck('C', 0x302), 0x108}, {ck('C', 0x307), 0x10A},
        {ck('C', 0x30C), 0x10C}, {ck('C', 0x327), 0xC7},  {ck('D', 0x30C), 0x10E},
        {ck('E', 0x300), 0xC8},  {ck('E', 0x301), 0xC9},  {ck('E', 0x302), 0xCA},
        {ck('E', 0x304), 0x112}, {ck('E', 0x306), 0x114}, {ck('E', 0x307), 0x116},
        {ck('E', 0x308), 0xCB},  {ck('E', 0x30C), 0x11A}, {ck('E', 0x328), 0x118},
        {ck('G', 0x302), 0x11C}, {ck('G', 0x306), 0x11E}, {ck('G', 0x307), 0x120},
        {ck('G', 0x327), 0x122}, {ck('H', 0x302), 0x124}, {ck('I', 0x300), 0xCC},
        {ck('I', 0x301), 0xCD},  {ck('I', 0x302), 0xCE},  {ck('I', 0x303), 0x128},
        {ck('I', 0x304), 0x12A}, {ck('I', 0x306), 0x12C}, {ck('I', 0x307), 0x130},
        {ck('I', 0x308), 0xCF},  {ck('I', 0x328), 0x12E}, {ck('J', 0x302), 0x134},
        {ck('K', 0x327), 0x136}, {ck('L', 0x301), 0x139}, {ck('L', 0x30C), 0x13D},
        {ck('L', 0x327), 0x13B}, {ck('N', 0x301), 0x143}, {ck('N', 0x303), 0xD1},
        {ck('N', 0x30C), 0x147}, {ck('N', 0x327), 0x145}, {ck('O', 0x300), 0xD2},
        {ck('O', 0x301), 0xD3},  {ck('O', 0x302), 0xD4},  {ck('O', 0x303), 0xD5},
        {ck('O', 0x304), 0x14C}, {ck('O', 0x306), 0x14E}, {ck('O', 0x308), 0xD6},
        {ck('O', 0x30B), 0x150}, {ck('R', 0x301), 0x154}, {ck('R', 0x30C), 0x158},
        {ck('R', 0x327), 0x156}, {ck('S', 0x301), 0x15A}, {ck('S', 0x302), 0x15C},
        {ck('S', 0x30C), 0x160}, {ck('S', 0x327), 0x15E}, {ck('T', 0x30C), 0x164},
        {ck('T', 0x327), 0x162}, {ck('U', 0x300), 0xD9},  {ck('U', 0x301), 0xDA},
        {ck('U', 0x302), 0xDB},  {ck('U', 0x303), 0x168}, {ck('U', 0x304), 0x16A},
        {ck('U', 0x306), 0x16C}, {ck('U', 0x308), 0xDC},  {ck('U', 0x30A), 0x16E},
        {ck('U', 0x30B), 0x170}, {ck('U', 0x328), 0x172}, {ck('W', 0x302), 0x174},
        {ck('Y', 0x301), 0xDD},  {ck('Y', 0x302), 0x176}, {ck('Y', 0x308), 0x178},
        {ck('Z', 0x301), 0x179}, {ck('Z', 0x307), 0x17B}, {ck('Z', 0x30C), 0x17D},
        {ck('a', 0x300), 0xE0},  {ck('a', 0x301), 0xE1},  {ck('a', 0x302), 0xE2},
        {ck('a', 0x303), 0xE3},  {ck('a', 0x304), 0x101}, {ck('a', 0x306), 0x103},
        {ck('a', 0x308), 0xE4},  {ck('a', 0x30A), 0xE5},  {ck('a', 0x328), 0x105},
        {ck('c', 0x301), 0x107}, {ck('c', 0x302), 0x109}, {ck('c', 0x307), 0x10B},
        {ck('c', 0x30C), 0x10D}, {ck('c', 0x327), 0xE7},  {ck('d', 0x30C), 0x10F},
        {ck('e', 0x300), 0xE8},  {ck('e', 0x301), 0xE9},  {ck('e', 0x302), 0xEA},
        {ck('e', 0x304), 0x113}, {ck('e', 0x306), 0x115}, {ck('e', 0x307), 0x117},
        {ck('e', 0x308), 0xEB},  {ck('e', 0x30C), 0x11B}, {ck('e', 0x328), 0x119},
        {ck('g', 0x302), 0x11D}, {ck('g', 0x306), 0x11F}, {ck('g', 0x307), 0x121},
        {ck('g', 0x327), 0x123}, {ck('h', 0x302), 0x125}, {ck('i', 0x300), 0xEC},
        {ck('i', 0x301), 0xED},  {ck('i', 0x302), 0xEE},  {ck('i', 0x303), 0x129},
        {ck('i', 0x304), 0x12B}, {ck('i', 0x306), 0x12D}, {ck('i', 0x308), 0xEF},
        {ck('i', 0x328), 0x12F}, {ck('j', 0x302), 0x135}, {ck('k', 0x327), 0x137},
        {ck('l', 0x301), 0x13A}, {ck('l', 0x30C), 0x13E}, {ck('l', 0x327), 0x13C},
        {ck('n', 0x301), 0x144}, {ck('n', 0x303), 0xF1},  {ck('n', 0x30C), 0x148},
        {ck('n', 0x327), 0x146}, {ck('o', 0x300), 0xF2},  {ck('o', 0x301), 0xF3},
        {ck('o', 0x302), 0xF4},  {ck('o', 0x303), 0xF5},  {ck('o', 0x304), 0x14D},
        {ck('o', 0x306), 0x14F}, {ck('o', 0x308), 0xF6},  {ck('o', 0x30B), 0x151},
        {ck('r', 0x301), 0x155}, {ck('r', 0x30C), 0x159}, {ck('r', 0x327), 0x157},
        {ck('s', 0x301), 0x15B}, {ck('s', 0x302), 0x15D}, {ck('s', 0x30C), 0x161},
        {ck('s', 0x327), 0x15F}, {ck('t', 0x30C), 0x165}, {ck('t', 0x327), 0x163},
        {ck('u', 0x300), 0xF9},  {ck('u', 0x301), 0xFA},  {ck('u', 0x302), 0xFB},
        {ck('u', 0x303), 0x169}, {ck('u', 0x304), 0x16B}, {ck('u', 0x306), 0x16D},
        {ck('u', 0x308), 0xFC},  {ck('u', 0x30A), 0x16F}, {ck('u', 0x30B), 0x171},
        {ck('u', 0x328), 0x173}, {ck('w', 0x302), 0x175}, {ck('y', 0x301), 0xFD},
        {ck('y', 0x302), 0x177}, {ck('y', 0x308), 0xFF},  {ck('z', 0x301), 0x17A},
        {ck('z', 0x307), 0x17C}, {ck('z', 0x30C), 0x17E},
    };
    std::sort(t.begin(), t.end(),
              [](const ComposePair& a, const ComposePair& b) { return a.key < b.key; });
    return t;
  }();
  return table;
}

inline char32_t compose_pair(char32_t base, char32_t mark) {
  if (mark < 0x300 || mark > 0x36F || base > 0xFFF) return 0;
  const char32_t key = ck(base, mark);
  const auto& table = compose_table();
  auto it = std::lower_bound(table.begin(), table.end(), key,
                             [](const ComposePair& p, char32_t k) { return p.key < k; });
  return (it != table.end() && it->key == key) ? it->composed : 0;
}

}  // namespace detail

inline bool is_combining_mark(char32_t cp) { return cp >= 0x300 && cp <= 0x36F; }

// Canonical composition over the Latin tables above. Precomposed input and
// scripts outside the tables come back unchanged.
inline std::string nfc(std::string_view s) {
  std::vector<char32_t> cps = decode_all(s);
  std::vector<char32_t> out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    if (!out.empty() && is_combining_mark(cp)) {
      if (char32_t composed = detail::compose_pair(out.back(), cp)) {
        out.back() = composed;
        continue;
      }
    }
    out.push_back(cp);
  }
  return encode_all(out);
}

inline std::string lowercase(std::string_view s) {
  std::vector<char32_t> cps = decode_all(s);
  for (char32_t& cp : cps) {
    if (!(cp & kInvalidByteFlag)) cp = to_lower(cp);
  }
  return encode_all(cps);
}

// Number of codepoints (invalid bytes count as one each).
inline std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); i += decode(s, i).size) ++n;
  return n;
}

}  // namespace kgforge::unicode
