// SPDX-License-Identifier: Apache-2.0

#include "steerkit/text.hpp"

#include <unicode/brkiter.h>
#include <unicode/normalizer2.h>
#include <unicode/ubrk.h>
#include <unicode/unistr.h>

#include <memory>

#include "steerkit/error.hpp"

namespace steer::text {

namespace {

icu::UnicodeString from_utf8(std::string_view s) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

std::string to_utf8(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw IoError("ICU: NFC normalizer unavailable");
  return *n;
}

icu::UnicodeString normalize_fold_u(const icu::UnicodeString& in) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString s = nfc().normalize(in, status);
  s.foldCase(U_FOLD_CASE_DEFAULT);
  s = nfc().normalize(s, status);
  if (U_FAILURE(status)) throw IoError("ICU: normalization failed");
  return s;
}

icu::BreakIterator& word_iterator() {
  thread_local std::unique_ptr<icu::BreakIterator> it = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> bi(
        icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) throw IoError("ICU: word break iterator unavailable");
    return bi;
  }();
  return *it;
}

bool is_terminal(UChar32 c) {
  switch (c) {
    case u'.':
    case u'!':
    case u'?':
    case 0x06D4:  // ARABIC FULL STOP
    case 0x061F:  // ARABIC QUESTION MARK
    case 0x0964:  // DEVANAGARI DANDA
    case 0x0965:  // DEVANAGARI DOUBLE DANDA
    case 0x3002:  // IDEOGRAPHIC FULL STOP
      return true;
    default:
      return false;
  }
}

template <typename OnWord, typename OnOther>
void walk(const icu::UnicodeString& s, OnWord on_word, OnOther on_other) {
  icu::BreakIterator& bi = word_iterator();
  bi.setText(s);
  int32_t start = bi.first();
  for (int32_t end = bi.next(); end != icu::BreakIterator::DONE; start = end, end = bi.next()) {
    icu::UnicodeString seg;
    s.extractBetween(start, end, seg);
    if (bi.getRuleStatus() >= UBRK_WORD_NONE_LIMIT) {
      on_word(seg);
    } else {
      on_other(seg);
    }
  }
}

}  // namespace

std::string normalize_fold(std::string_view utf8) { return to_utf8(normalize_fold_u(from_utf8(utf8))); }

std::vector<std::string> words(std::string_view utf8) {
  std::vector<std::string> out;
  walk(
      from_utf8(utf8), [&](const icu::UnicodeString& w) { out.push_back(to_utf8(w)); },
      [](const icu::UnicodeString&) {});
  return out;
}

std::vector<std::string> folded_words(std::string_view utf8) {
  std::vector<std::string> out;
  walk(
      normalize_fold_u(from_utf8(utf8)),
      [&](const icu::UnicodeString& w) { out.push_back(to_utf8(w)); },
      [](const icu::UnicodeString&) {});
  return out;
}

std::vector<std::vector<std::string>> folded_sentences(std::string_view utf8) {
  std::vector<std::vector<std::string>> out(1);
  walk(
      normalize_fold_u(from_utf8(utf8)),
      [&](const icu::UnicodeString& w) { out.back().push_back(to_utf8(w)); },
      [&](const icu::UnicodeString& seg) {
        for (int32_t i = 0; i < seg.length(); i = seg.moveIndex32(i, 1)) {
          if (is_terminal(seg.char32At(i))) {
            if (!out.back().empty()) out.emplace_back();
            break;
          }
        }
      });
  if (out.back().empty()) out.pop_back();
  return out;
}

}  // namespace steer::text
