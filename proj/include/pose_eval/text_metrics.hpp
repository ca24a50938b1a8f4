#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pose_eval {

struct TextSegmentPair {
  std::string id;
  std::string hypothesis;  // UTF-8
  std::string reference;   // UTF-8
};

/// NFC normalization (invalid UTF-8 sequences become U+FFFD).
std::string nfc_normalize(std::string_view utf8);

/// mteval-v13a tokenization, case preserved. Input is NFC-normalized first.
std::vector<std::string> tokenize_13a(std::string_view utf8);

/// Corpus BLEU, signature nrefs:1|case:mixed|eff:yes|tok:13a|smooth:exp.
/// Scale 0-100. Throws EmptyBatch.
double bleu4(const std::vector<TextSegmentPair>& pairs);

/// Corpus chrF, signature nc:6|nw:0|space:no, beta 2. Scale 0-100. Throws EmptyBatch.
double chrf(const std::vector<TextSegmentPair>& pairs);

inline constexpr std::string_view kBleuSignature =
    "nrefs:1|case:mixed|eff:yes|tok:13a|smooth:exp|version:2.3.1";
inline constexpr std::string_view kChrfSignature = "nrefs:1|case:mixed|eff:yes|nc:6|nw:0|space:no|version:2.3.1";

/// CSV with header `id,hypothesis,reference`. Throws MalformedFile, DuplicateSegment.
std::vector<TextSegmentPair> parse_text_pairs(std::string_view text,
                                              const std::string& origin = "<memory>");
std::vector<TextSegmentPair> read_text_pairs(const std::filesystem::path& path);

}  // namespace pose_eval
