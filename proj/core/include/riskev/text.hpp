#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace riskev {

/// Decodes UTF-8 into Unicode scalar values. Throws DataError on malformed input.
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view chars);
bool is_valid_utf8(std::string_view utf8);

/// Word character in the sense of Python's Unicode-aware `\w`: letters, numerics and '_'.
bool is_word_char(char32_t c);
/// `\d`: Unicode decimal digit (general category Nd).
bool is_decimal_digit(char32_t c);
bool is_space(char32_t c);

/// Full Unicode lowercase mapping of a UTF-8 string.
std::string to_lower(std::string_view utf8);
/// NFKD decomposition followed by removal of combining marks.
std::string strip_accents(std::string_view utf8);

/// UTF-8 text addressable by Unicode scalar index. All spans in the library
/// are [start, end) scalar indices into one of these.
class IndexedText {
 public:
  IndexedText() = default;
  explicit IndexedText(std::string utf8);

  const std::string& utf8() const noexcept { return utf8_; }
  std::u32string_view chars() const noexcept { return chars_; }
  std::size_t size() const noexcept { return chars_.size(); }
  bool empty() const noexcept { return chars_.empty(); }

  /// Verbatim UTF-8 of the scalar range [start, end). Throws std::out_of_range.
  std::string slice(std::size_t start, std::size_t end) const;
  std::size_t byte_offset(std::size_t char_index) const;
  /// Scalar index of the character containing `byte`.
  std::size_t char_index(std::size_t byte) const;

 private:
  std::string utf8_;
  std::u32string chars_;
  std::vector<std::size_t> byte_offsets_;  // size() + 1 entries
};

}  // namespace riskev
