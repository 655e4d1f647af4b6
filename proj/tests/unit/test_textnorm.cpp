#include "kgforge/textnorm.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "kgforge/unicode.hpp"

namespace tn = kgforge::textnorm;

namespace {

// Independent full-matrix edit distance oracle, kept separate from the
// two-row implementation under test.
std::size_t oracle_edit_distance(const std::string& a, const std::string& b) {
  std::vector<char32_t> ca = kgforge::unicode::decode_all(a);
  std::vector<char32_t> cb = kgforge::unicode::decode_all(b);
  const std::size_t n = ca.size(), m = cb.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = d[i - 1][j - 1] + (ca[i - 1] == cb[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[n][m];
}

std::string random_markdown(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "word",  "**bold**", "*i*",    "_u_",      "`code`",  "[x](http://a.b)",
      "![im](p.png)", "# h",    "- item", "> quote",  "```",     "plain text",
      "*",     "**",       "[",      "](",       "a*b",     "1. list",
      "__d__", "~~~",      "#tag",   "text (x)", "\n",      " ",
      "ümlaut", "é",  "\"q\"",  "\\esc",    "***t***", "`tick",
  };
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> len(0, 12);
  std::string out;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    out += pieces[pick(rng)];
    if (rng() % 3 == 0) out += ' ';
  }
  return out;
}

std::string random_word(std::mt19937_64& rng, std::size_t max_len) {
  static const std::string alphabet = "abcdefghij xyz-";
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) out.push_back(alphabet[pick(rng)]);
  return out;
}

}  // namespace

TEST(StripMarkdown, Emphasis) {
  EXPECT_EQ(tn::strip_markdown("**Deep** _learning_ rocks"), "Deep learning rocks");
}

TEST(StripMarkdown, Links) {
  EXPECT_EQ(tn::strip_markdown("See [BERT](https://x.y) for details"), "See BERT for details");
}

TEST(StripMarkdown, Images) {
  EXPECT_EQ(tn::strip_markdown("before ![diagram](fig.png) after"), "before diagram after");
}

TEST(StripMarkdown, InlineCode) {
  EXPECT_EQ(tn::strip_markdown("run `train.py` now"), "run train.py now");
}

TEST(StripMarkdown, HeadingsBulletsQuotes) {
  EXPECT_EQ(tn::strip_markdown("# Title\n- one\n- two\n> quoted"), "Title\none\ntwo\nquoted");
}

TEST(StripMarkdown, FencedCodeKeepsContent) {
  EXPECT_EQ(tn::strip_markdown("a\n```\nx = 1\n```\nb"), "a\nx = 1\nb");
}

TEST(StripMarkdown, PlainTextIdentity) {
  const std::string abstract_text =
      "We study transformers. Results improve over prior work by 2.3 points.";
  EXPECT_EQ(tn::strip_markdown(abstract_text), abstract_text);
}

TEST(StripMarkdown, IdempotentOnRandomInput) {
  std::mt19937_64 rng(20230601);
  for (int i = 0; i < 10000; ++i) {
    const std::string input = random_markdown(rng);
    const std::string once = tn::strip_markdown(input);
    EXPECT_EQ(tn::strip_markdown(once), once) << "input: " << input;
  }
}

TEST(Normalize, BasicExamples) {
  EXPECT_EQ(tn::normalize("Attention Is All You Need!").value, "attention is all you need");
  EXPECT_EQ(tn::normalize("  ACL   2020 ").value, "acl 2020");
}

TEST(Normalize, DiacriticsPreservedAndComposed) {
  EXPECT_EQ(tn::normalize("Müller").value, "müller");
  // decomposed u + combining diaeresis composes to the same bytes
  EXPECT_EQ(tn::normalize("Müller").value, "müller");
}

TEST(Normalize, HyphenSurvivesInsideWords) {
  EXPECT_EQ(tn::normalize("Pre-training of Models").value, "pre-training of models");
  EXPECT_EQ(tn::normalize("state - of - the - art").value, "state of the art");
}

TEST(Normalize, IdempotentAndCaseInsensitive) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 2000; ++i) {
    std::string s = random_word(rng, 24);
    const std::string once = tn::normalize(s).value;
    EXPECT_EQ(tn::normalize(once).value, once);
    std::string upper = s;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    EXPECT_EQ(tn::normalize(upper).value, once) << s;
  }
}

TEST(TitleVariants, SubtitleAndBrackets) {
  const auto v = tn::title_variants("BERT: Pre-training of Deep Bidirectional Transformers");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], "bert pre-training of deep bidirectional transformers");
  EXPECT_EQ(v[1], "bert");
}

TEST(TitleVariants, AllFourDistinct) {
  const auto v = tn::title_variants("GLUE (v2): A Benchmark [Extended]");
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0], "glue v2 a benchmark extended");
  EXPECT_EQ(v[1], "glue v2");
  EXPECT_EQ(v[2], "glue a benchmark");
  EXPECT_EQ(v[3], "glue");
}

TEST(TitleVariants, PlainTitleSingleVariant) {
  const auto v = tn::title_variants("Plain Title");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "plain title");
}

TEST(TitleVariants, EmptyTitleThrows) {
  EXPECT_THROW(tn::title_variants(""), kgforge::EmptyTitleError);
  EXPECT_THROW(tn::title_variants("!!!"), kgforge::EmptyTitleError);
}

TEST(TitleVariants, FirstElementIsNormalizedTitleNoDuplicates) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    std::string title = random_word(rng, 20) + ": " + random_word(rng, 10);
    std::string base = tn::normalize(title).value;
    if (base.empty()) continue;
    const auto v = tn::title_variants(title);
    EXPECT_EQ(v[0], base);
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (std::size_t b = a + 1; b < v.size(); ++b) EXPECT_NE(v[a], v[b]);
    }
  }
}

TEST(FuzzySimilarity, SpecExamples) {
  EXPECT_DOUBLE_EQ(tn::fuzzy_similarity("jon smith", "john smith"), 0.9);
  EXPECT_DOUBLE_EQ(tn::fuzzy_similarity("acl", "acl"), 1.0);
  EXPECT_DOUBLE_EQ(tn::fuzzy_similarity("abc", "xyz"), 0.0);
  EXPECT_DOUBLE_EQ(tn::fuzzy_similarity("", ""), 1.0);
}

TEST(FuzzySimilarity, CodepointNotByteDistance) {
  // ü is two bytes but one codepoint; distance to "u" must be 1 of 6, not 2 of 7
  EXPECT_DOUBLE_EQ(tn::fuzzy_similarity("müller", "muller"), 1.0 - 1.0 / 6.0);
}

TEST(FuzzySimilarity, AgreesWithOracleSymmetricInRange) {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 1000; ++i) {
    const std::string a = random_word(rng, 16);
    const std::string b = random_word(rng, 16);
    const double fab = tn::fuzzy_similarity(a, b);
    const double fba = tn::fuzzy_similarity(b, a);
    EXPECT_DOUBLE_EQ(fab, fba);
    EXPECT_GE(fab, 0.0);
    EXPECT_LE(fab, 1.0);
    EXPECT_DOUBLE_EQ(tn::fuzzy_similarity(a, a), 1.0);
    const std::size_t longest =
        std::max(kgforge::unicode::length(a), kgforge::unicode::length(b));
    const double expected =
        longest == 0 ? 1.0
                     : 1.0 - static_cast<double>(oracle_edit_distance(a, b)) /
                           static_cast<double>(longest);
    EXPECT_DOUBLE_EQ(fab, expected) << a << " vs " << b;
  }
}
