// Unicode helpers used for matching task words against dump surfaces.
#ifndef GEOPROBE_TEXT_HPP
#define GEOPROBE_TEXT_HPP

#include <string>
#include <string_view>

namespace geoprobe::text {

/// NFC-normalized copy of a UTF-8 string. Throws std::invalid_argument on
/// malformed UTF-8.
std::string nfc(std::string_view utf8);

/// Full Unicode lowercase (root locale) followed by NFC.
std::string lower_nfc(std::string_view utf8);

/// Trims ASCII whitespace, including a trailing '\r'.
std::string_view trim(std::string_view s);

}  // namespace geoprobe::text

#endif  // GEOPROBE_TEXT_HPP
