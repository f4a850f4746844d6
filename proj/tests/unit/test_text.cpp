#include <gtest/gtest.h>

#include "riskev/error.hpp"
#include "riskev/hash.hpp"
#include "riskev/text.hpp"

namespace riskev {
namespace {

TEST(Utf8, RoundTripsMultibyteText) {
  const std::string s = "caf\xC3\xA9 \xE2\x80\x9Cquoted\xE2\x80\x9D \xF0\x9F\x98\xA2";
  const auto chars = decode_utf8(s);
  EXPECT_EQ(chars.size(), 15u);
  EXPECT_EQ(chars[3], U'é');
  EXPECT_EQ(encode_utf8(chars), s);
  EXPECT_TRUE(is_valid_utf8(s));
}

TEST(Utf8, RejectsMalformedInput) {
  EXPECT_FALSE(is_valid_utf8("\xC3"));
  EXPECT_FALSE(is_valid_utf8("\xED\xA0\x80"));  // surrogate
  EXPECT_FALSE(is_valid_utf8("\xC0\xAF"));      // overlong
  EXPECT_THROW(decode_utf8("ok \xFF"), DataError);
}

TEST(CharClasses, FollowUnicodeWordDefinition) {
  EXPECT_TRUE(is_word_char(U'a'));
  EXPECT_TRUE(is_word_char(U'_'));
  EXPECT_TRUE(is_word_char(U'é'));
  EXPECT_TRUE(is_word_char(U'Ж'));  // Cyrillic
  EXPECT_TRUE(is_word_char(U'7'));
  EXPECT_TRUE(is_word_char(U'٣'));  // Arabic-Indic three
  EXPECT_FALSE(is_word_char(U'\''));
  EXPECT_FALSE(is_word_char(U' '));
  EXPECT_FALSE(is_word_char(U'-'));
  EXPECT_TRUE(is_decimal_digit(U'7'));
  EXPECT_TRUE(is_decimal_digit(U'٣'));
  EXPECT_FALSE(is_decimal_digit(U'½'));  // vulgar fraction: numeric, not a decimal digit
  EXPECT_TRUE(is_space(U' '));
  EXPECT_TRUE(is_space(U'\n'));
}

TEST(Normalization, LowercasesAndStripsAccents) {
  EXPECT_EQ(to_lower("I FEEL Lost"), "i feel lost");
  EXPECT_EQ(to_lower("\xC3\x89T\xC3\x89"), "\xC3\xA9t\xC3\xA9");  // ÉTÉ -> été
  EXPECT_EQ(strip_accents("caf\xC3\xA9 na\xC3\xAFve"), "cafe naive");
  EXPECT_EQ(strip_accents("plain"), "plain");
  EXPECT_EQ(strip_accents("\xEF\xAC\x81"), "fi");  // ligature decomposes under NFKD
}

TEST(IndexedText, SlicesByScalarIndex) {
  const IndexedText t("a\xC3\xA9z \xF0\x9F\x98\xA2!");
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.slice(1, 3), "\xC3\xA9z");
  EXPECT_EQ(t.slice(4, 6), "\xF0\x9F\x98\xA2!");
  EXPECT_EQ(t.byte_offset(2), 3u);
  EXPECT_EQ(t.char_index(3), 2u);
  EXPECT_EQ(t.char_index(2), 1u);  // continuation byte belongs to the é
  EXPECT_THROW(t.slice(4, 7), std::out_of_range);
}

TEST(Hash, IsStableFnv1a) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(to_hex(0x1fULL), "000000000000001f");
}

}  // namespace
}  // namespace riskev
