// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace steer::text {

/// NFC, then full Unicode case folding, then NFC again. Invalid UTF-8 bytes
/// become U+FFFD.
std::string normalize_fold(std::string_view utf8);

/// Word segments (UAX #29 word boundaries; segments containing letters,
/// digits or ideographs) of the text, in order and unmodified.
std::vector<std::string> words(std::string_view utf8);

/// words(normalize_fold(utf8)).
std::vector<std::string> folded_words(std::string_view utf8);

/// Folded words grouped into sentences. A sentence ends at a non-word
/// segment holding terminal punctuation (. ! ? and the Arabic-script and
/// Indic full stops / question mark) or at the end of the text. Empty
/// sentences are dropped.
std::vector<std::vector<std::string>> folded_sentences(std::string_view utf8);

}  // namespace steer::text
