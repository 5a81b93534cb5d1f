#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rumour::text {

/// Decodes UTF-8; ill-formed sequences become U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);

bool is_space(char32_t c);
bool is_upper(char32_t c);
bool is_lower(char32_t c);
bool is_alpha(char32_t c);
bool is_digit(char32_t c);
bool is_punct(char32_t c);
bool is_control(char32_t c);

std::u32string to_lower(std::u32string_view s);
std::string to_lower(std::string_view utf8);

/// Maximal runs of non-whitespace code points.
std::vector<std::u32string> split_whitespace(std::u32string_view s);

/// Removes leading and trailing punctuation (Unicode P* categories).
std::u32string strip_punct(std::u32string_view token);

/// Unicode NFC normalisation.
std::string nfc(std::string_view utf8);

}  // namespace rumour::text
