#include "tqa/metric.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace tqa {
namespace {

constexpr double kNumericTolerance = 1e-6;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// "2,000" or "-1,234,567.89" -> digits without separators; anything that is
// not strict digit grouping is left untouched so "1,2" never collapses to 12.
std::optional<std::string> strip_thousands_separators(std::string_view s) {
  if (s.find(',') == std::string_view::npos) return std::nullopt;
  std::string_view body = s;
  std::string sign;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    sign = body.front();
    body.remove_prefix(1);
  }
  std::string_view fractional;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    fractional = body.substr(dot);
    body = body.substr(0, dot);
    if (fractional.find(',') != std::string_view::npos) return std::nullopt;
    for (std::size_t i = 1; i < fractional.size(); ++i) {
      if (!is_digit(fractional[i])) return std::nullopt;
    }
  }
  std::size_t group = 0;
  std::string digits;
  bool first_group = true;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    std::string_view part =
        body.substr(start, comma == std::string_view::npos ? body.size() - start : comma - start);
    if (first_group) {
      if (part.empty() || part.size() > 3) return std::nullopt;
      first_group = false;
    } else if (part.size() != 3) {
      return std::nullopt;
    }
    for (char c : part) {
      if (!is_digit(c)) return std::nullopt;
    }
    digits.append(part);
    ++group;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (group < 2) return std::nullopt;
  return sign + digits + std::string(fractional);
}

std::optional<double> parse_full_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);  // from_chars rejects explicit plus
  if (s.empty()) return std::nullopt;
  double value = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value, std::chars_format::general);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::string normalize_answer(std::string_view raw) {
  std::string_view t = trim(raw);
  std::string out;
  out.reserve(t.size());
  bool pending_space = false;
  for (char c : t) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (out.size() >= 2 && (out.front() == '"' || out.front() == '\'') && out.back() == out.front()) {
    out = out.substr(1, out.size() - 2);
    std::string_view again = trim(out);
    out.assign(again.begin(), again.end());
  }
  return out;
}

std::optional<double> numeric_answer_value(std::string_view normalized) {
  if (auto stripped = strip_thousands_separators(normalized)) {
    return parse_full_number(*stripped);
  }
  return parse_full_number(normalized);
}

bool answer_values_match(std::string_view normalized_a, std::string_view normalized_b) {
  auto na = numeric_answer_value(normalized_a);
  auto nb = numeric_answer_value(normalized_b);
  if (na && nb) {
    return std::fabs(*na - *nb) <= kNumericTolerance;
  }
  return normalized_a == normalized_b;
}

int exact_match(const std::string& predicted_text, const std::vector<std::string>& gold_answers) {
  std::vector<std::string> predicted;
  std::size_t start = 0;
  while (true) {
    std::size_t sep = predicted_text.find(kAnswerListSeparator, start);
    std::string_view part(predicted_text.data() + start,
                          (sep == std::string::npos ? predicted_text.size() : sep) - start);
    predicted.push_back(normalize_answer(part));
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  std::vector<std::string> gold;
  gold.reserve(gold_answers.size());
  for (const auto& g : gold_answers) gold.push_back(normalize_answer(g));

  if (predicted.size() != gold.size()) return 0;
  std::vector<bool> used(gold.size(), false);
  for (const auto& p : predicted) {
    bool matched = false;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (!used[i] && answer_values_match(p, gold[i])) {
        used[i] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return 0;
  }
  return 1;
}

}  // namespace tqa
