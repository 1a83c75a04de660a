#include "geoprobe/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace geoprobe::text {

namespace {

icu::UnicodeString decode(std::string_view utf8) {
  auto s = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  // ICU substitutes U+FFFD for invalid sequences.
  const bool replaced = s.indexOf(static_cast<char16_t>(0xFFFD)) >= 0 &&
                        utf8.find("\xEF\xBF\xBD") == std::string_view::npos;
  if (s.isBogus() || replaced) {
    throw std::invalid_argument("malformed UTF-8: " + std::string(utf8));
  }
  return s;
}

std::string normalize(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  icu::UnicodeString out = nfc->normalize(s, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

}  // namespace

std::string nfc(std::string_view utf8) { return normalize(decode(utf8)); }

std::string lower_nfc(std::string_view utf8) {
  auto s = decode(utf8);
  s.toLower(icu::Locale::getRoot());
  return normalize(s);
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace geoprobe::text
