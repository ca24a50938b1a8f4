#include "pose_eval/text_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <unordered_map>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "pose_eval/csv.hpp"
#include "pose_eval/error.hpp"

namespace pose_eval {
namespace {

using Text = std::u32string;

Text to_code_points(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const auto* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) fail(ErrorCode::InvalidConfig, "ICU NFC normalizer unavailable");
  const auto src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  const auto norm = nfc->normalize(src, status);
  if (U_FAILURE(status)) fail(ErrorCode::MalformedFile, "NFC normalization failed");
  Text out;
  out.reserve(static_cast<std::size_t>(norm.length()));
  for (int32_t i = 0; i < norm.length(); i = norm.moveIndex32(i, 1)) {
    out.push_back(static_cast<char32_t>(norm.char32At(i)));
  }
  return out;
}

std::string to_utf8(const Text& t) {
  std::string out;
  icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(t.data()),
                                static_cast<int32_t>(t.size()))
      .toUTF8String(out);
  return out;
}

// Python's str.isspace(): category Zs or bidirectional class WS, B or S.
bool is_py_space(char32_t c) {
  const auto cp = static_cast<UChar32>(c);
  if (u_charType(cp) == U_SPACE_SEPARATOR) return true;
  const auto dir = u_charDirection(cp);
  return dir == U_WHITE_SPACE_NEUTRAL || dir == U_BLOCK_SEPARATOR || dir == U_SEGMENT_SEPARATOR;
}

std::vector<Text> split_py(const Text& s) {
  std::vector<Text> out;
  Text cur;
  for (char32_t c : s) {
    if (is_py_space(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void replace_all(Text& s, const Text& from, const Text& to) {
  Text out;
  std::size_t i = 0;
  while (true) {
    const auto j = s.find(from, i);
    if (j == Text::npos) break;
    out.append(s, i, j - i);
    out += to;
    i = j + from.size();
  }
  out.append(s, i, Text::npos);
  s = std::move(out);
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_period_comma(char32_t c) { return c == U'.' || c == U','; }

bool is_13a_symbol(char32_t c) {
  return (c >= 0x7B && c <= 0x7E) || (c >= 0x5B && c <= 0x60) || (c >= 0x20 && c <= 0x26) ||
         (c >= 0x28 && c <= 0x2B) || (c >= 0x3A && c <= 0x40) || c == 0x2F;
}

// Left-to-right, non-overlapping substitution of a two-character pattern
// (first, second) -> prefix first middle second suffix.
template <typename First, typename Second>
Text sub_pair(const Text& s, First first, Second second, std::u32string_view before,
              std::u32string_view middle, std::u32string_view after) {
  Text out;
  out.reserve(s.size() + s.size() / 2);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && first(s[i]) && second(s[i + 1])) {
      out += before;
      out += s[i];
      out += middle;
      out += s[i + 1];
      out += after;
      i += 2;
    } else {
      out += s[i++];
    }
  }
  return out;
}

std::vector<Text> tokenize_13a_cp(Text line) {
  replace_all(line, U"<skipped>", U"");
  replace_all(line, U"-\n", U"");
  replace_all(line, U"\n", U" ");
  if (line.find(U'&') != Text::npos) {
    replace_all(line, U"&quot;", U"\"");
    replace_all(line, U"&amp;", U"&");
    replace_all(line, U"&lt;", U"<");
    replace_all(line, U"&gt;", U">");
  }
  line = U" " + line + U" ";

  Text padded;
  padded.reserve(line.size() * 2);
  for (char32_t c : line) {
    if (is_13a_symbol(c)) {
      padded += U' ';
      padded += c;
      padded += U' ';
    } else {
      padded += c;
    }
  }
  const auto not_digit = [](char32_t c) { return !is_digit(c); };
  padded = sub_pair(padded, not_digit, is_period_comma, U"", U" ", U" ");
  padded = sub_pair(padded, is_period_comma, not_digit, U" ", U" ", U"");
  padded = sub_pair(padded, is_digit, [](char32_t c) { return c == U'-'; }, U"", U" ", U" ");
  return split_py(padded);
}

Text rstrip_py(Text s) {
  while (!s.empty() && is_py_space(s.back())) s.pop_back();
  return s;
}

using NgramCounts = std::unordered_map<Text, int>;

NgramCounts word_ngrams(const std::vector<Text>& tokens, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    Text key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += U' ';
      key += tokens[i + k];
    }
    ++out[key];
  }
  return out;
}

NgramCounts char_ngrams(const Text& s, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++out[s.substr(i, n)];
  return out;
}

struct Overlap {
  long long hyp = 0;
  long long ref = 0;
  long long match = 0;
};

Overlap overlap(const NgramCounts& h, const NgramCounts& r) {
  Overlap o;
  for (const auto& [k, c] : h) {
    o.hyp += c;
    if (auto it = r.find(k); it != r.end()) o.match += std::min(c, it->second);
  }
  for (const auto& [k, c] : r) o.ref += c;
  return o;
}

double log_or_floor(double p) { return p == 0.0 ? -9999999999.0 : std::log(p); }

void require_nonempty(const std::vector<TextSegmentPair>& pairs) {
  if (pairs.empty()) fail(ErrorCode::EmptyBatch, "no segments to score");
}

}  // namespace

std::string nfc_normalize(std::string_view utf8) { return to_utf8(to_code_points(utf8)); }

std::vector<std::string> tokenize_13a(std::string_view utf8) {
  std::vector<std::string> out;
  for (const auto& t : tokenize_13a_cp(to_code_points(utf8))) out.push_back(to_utf8(t));
  return out;
}

double bleu4(const std::vector<TextSegmentPair>& pairs) {
  require_nonempty(pairs);
  constexpr std::size_t kOrder = 4;
  std::array<long long, kOrder> correct{};
  std::array<long long, kOrder> total{};
  long long sys_len = 0;
  long long ref_len = 0;
  for (const auto& p : pairs) {
    const auto hyp = tokenize_13a_cp(rstrip_py(to_code_points(p.hypothesis)));
    const auto ref = tokenize_13a_cp(rstrip_py(to_code_points(p.reference)));
    sys_len += static_cast<long long>(hyp.size());
    ref_len += static_cast<long long>(ref.size());
    for (std::size_t n = 1; n <= kOrder; ++n) {
      const auto o = overlap(word_ngrams(hyp, n), word_ngrams(ref, n));
      correct[n - 1] += o.match;
      total[n - 1] += o.hyp;
    }
  }

  double bp = 1.0;
  if (sys_len < ref_len) {
    bp = sys_len > 0 ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(sys_len))
                     : 0.0;
  }
  if (std::all_of(correct.begin(), correct.end(), [](long long c) { return c == 0; })) return 0.0;

  std::array<double, kOrder> precision{};
  double smooth = 1.0;
  std::size_t eff_order = kOrder;
  for (std::size_t n = 1; n <= kOrder; ++n) {
    if (total[n - 1] == 0) break;
    eff_order = n;
    if (correct[n - 1] == 0) {
      smooth *= 2.0;
      precision[n - 1] = 100.0 / (smooth * static_cast<double>(total[n - 1]));
    } else {
      precision[n - 1] =
          100.0 * static_cast<double>(correct[n - 1]) / static_cast<double>(total[n - 1]);
    }
  }
  double log_sum = 0.0;
  for (std::size_t n = 0; n < eff_order; ++n) log_sum += log_or_floor(precision[n]);
  return bp * std::exp(log_sum / static_cast<double>(eff_order));
}

double chrf(const std::vector<TextSegmentPair>& pairs) {
  require_nonempty(pairs);
  constexpr std::size_t kOrder = 6;
  constexpr double kBeta = 2.0;
  std::array<Overlap, kOrder> stats{};
  for (const auto& p : pairs) {
    Text hyp;
    Text ref;
    for (const auto& t : split_py(to_code_points(p.hypothesis))) hyp += t;
    for (const auto& t : split_py(to_code_points(p.reference))) ref += t;
    for (std::size_t n = 1; n <= kOrder; ++n) {
      const auto o = overlap(char_ngrams(hyp, n), char_ngrams(ref, n));
      stats[n - 1].hyp += o.hyp;
      stats[n - 1].ref += o.ref;
      stats[n - 1].match += o.match;
    }
  }

  double avg_prec = 0.0;
  double avg_rec = 0.0;
  int effective = 0;
  for (const auto& s : stats) {
    if (s.hyp > 0 && s.ref > 0) {
      avg_prec += static_cast<double>(s.match) / static_cast<double>(s.hyp);
      avg_rec += static_cast<double>(s.match) / static_cast<double>(s.ref);
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  avg_prec /= effective;
  avg_rec /= effective;
  if (avg_prec + avg_rec == 0.0) return 0.0;
  const double factor = kBeta * kBeta;
  double score = (1.0 + factor) * avg_prec * avg_rec;
  score /= factor * avg_prec + avg_rec;
  return 100.0 * score;
}

std::vector<TextSegmentPair> parse_text_pairs(std::string_view text, const std::string& origin) {
  const auto table = parse_csv(text, origin);
  table.require_header({"id", "hypothesis", "reference"});
  std::vector<TextSegmentPair> out;
  std::set<std::string> ids;
  for (const auto& row : table.rows) {
    if (row.fields[0].empty()) fail(ErrorCode::MalformedFile, table.where(row) + ": empty id");
    if (!ids.insert(row.fields[0]).second) {
      fail(ErrorCode::DuplicateSegment, table.where(row) + ": segment '" + row.fields[0] + "' repeats");
    }
    out.push_back({row.fields[0], row.fields[1], row.fields[2]});
  }
  return out;
}

std::vector<TextSegmentPair> read_text_pairs(const std::filesystem::path& path) {
  return parse_text_pairs(read_text_file(path), path.string());
}

}  // namespace pose_eval
