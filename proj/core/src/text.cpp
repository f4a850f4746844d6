#include "riskev/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "riskev/error.hpp"
#include "riskev/hash.hpp"

namespace riskev {

std::u32string decode_utf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const std::uint8_t*>(utf8.data());
  const auto length = static_cast<std::int32_t>(utf8.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t at = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) throw DataError("invalid UTF-8 at byte " + std::to_string(at));
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string encode_utf8(std::u32string_view chars) {
  std::string out;
  out.reserve(chars.size());
  for (char32_t c : chars) {
    std::uint8_t buf[U8_MAX_LENGTH];
    std::int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) throw DataError("cannot encode code point as UTF-8");
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

bool is_valid_utf8(std::string_view utf8) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(utf8.data());
  const auto length = static_cast<std::int32_t>(utf8.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

bool is_word_char(char32_t c) {
  if (c == U'_') return true;
  const auto cp = static_cast<UChar32>(c);
  return u_isalpha(cp) || u_getIntPropertyValue(cp, UCHAR_NUMERIC_TYPE) != U_NT_NONE;
}

bool is_decimal_digit(char32_t c) {
  return u_charType(static_cast<UChar32>(c)) == U_DECIMAL_DIGIT_NUMBER;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::string to_lower(std::string_view utf8) {
  if (std::all_of(utf8.begin(), utf8.end(), [](unsigned char c) { return c < 0x80; })) {
    std::string out(utf8);
    for (auto& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  auto s = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<std::int32_t>(utf8.size())));
  s.toLower(icu::Locale::getRoot());
  std::string out;
  s.toUTF8String(out);
  return out;
}

std::string strip_accents(std::string_view utf8) {
  bool ascii = true;
  for (unsigned char c : utf8) {
    if (c >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) return std::string(utf8);

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkd = icu::Normalizer2::getNFKDInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFKD normalizer unavailable");
  auto s = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<std::int32_t>(utf8.size())));
  icu::UnicodeString decomposed = nfkd->normalize(s, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFKD normalization failed");

  icu::UnicodeString kept;
  for (std::int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    if (u_getCombiningClass(c) == 0) kept.append(c);
    i += U16_LENGTH(c);
  }
  std::string out;
  kept.toUTF8String(out);
  return out;
}

IndexedText::IndexedText(std::string utf8) : utf8_(std::move(utf8)) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(utf8_.data());
  const auto length = static_cast<std::int32_t>(utf8_.size());
  chars_.reserve(utf8_.size());
  byte_offsets_.reserve(utf8_.size() + 1);
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t at = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) throw DataError("invalid UTF-8 at byte " + std::to_string(at));
    byte_offsets_.push_back(static_cast<std::size_t>(at));
    chars_.push_back(static_cast<char32_t>(c));
  }
  byte_offsets_.push_back(utf8_.size());
}

std::string IndexedText::slice(std::size_t start, std::size_t end) const {
  if (start > end || end > chars_.size()) {
    throw std::out_of_range("IndexedText::slice [" + std::to_string(start) + ", " +
                            std::to_string(end) + ") outside text of length " +
                            std::to_string(chars_.size()));
  }
  return utf8_.substr(byte_offsets_[start], byte_offsets_[end] - byte_offsets_[start]);
}

std::size_t IndexedText::byte_offset(std::size_t char_index) const {
  if (char_index >= byte_offsets_.size()) throw std::out_of_range("IndexedText::byte_offset");
  return byte_offsets_[char_index];
}

std::size_t IndexedText::char_index(std::size_t byte) const {
  if (byte > utf8_.size()) throw std::out_of_range("IndexedText::char_index");
  auto it = std::upper_bound(byte_offsets_.begin(), byte_offsets_.end(), byte);
  return static_cast<std::size_t>(std::distance(byte_offsets_.begin(), it)) - 1;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace riskev
