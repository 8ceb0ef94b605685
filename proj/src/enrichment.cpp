#include "coldstart/enrichment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <vector>

#include "coldstart/common.hpp"

namespace coldstart {

namespace {

constexpr std::array<ContextField, 5> kFieldOrder = {
    ContextField::Title, ContextField::Classification, ContextField::Location,
    ContextField::Requirements, ContextField::Skills};

constexpr std::size_t kMaxHeadingWords = 4;

struct Heading {
  std::size_t start;          // first character of the heading phrase
  std::size_t content_start;  // just past the ':'
  std::string name;           // lowercased phrase
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<Heading> heading_ending_at(std::string_view text, std::size_t colon) {
  std::size_t begin = colon;
  while (begin > 0) {
    const char prev = text[begin - 1];
    if (prev == '\n' || prev == ':') break;
    if ((prev == '.' || prev == '!' || prev == '?') && begin < text.size() && is_space(text[begin]))
      break;
    --begin;
  }
  std::string_view phrase = text.substr(begin, colon - begin);
  phrase = trim(phrase);
  if (phrase.empty()) return std::nullopt;
  if (std::none_of(phrase.begin(), phrase.end(),
                   [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
    return std::nullopt;
  std::size_t words = 1;
  for (std::size_t i = 1; i < phrase.size(); ++i)
    if (is_space(phrase[i]) && !is_space(phrase[i - 1])) ++words;
  if (words > kMaxHeadingWords) return std::nullopt;

  Heading h;
  h.start = static_cast<std::size_t>(phrase.data() - text.data());
  h.content_start = colon + 1;
  h.name.reserve(phrase.size());
  for (char c : phrase) h.name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return h;
}

void append_repeated(std::string& body, std::string_view text, int times) {
  for (int r = 0; r < times; ++r) {
    if (!body.empty()) body.push_back(' ');
    body.append(text);
  }
}

}  // namespace

std::string_view to_string(ContextField field) {
  switch (field) {
    case ContextField::Title: return "title";
    case ContextField::Classification: return "classification";
    case ContextField::Location: return "location";
    case ContextField::Requirements: return "requirements";
    case ContextField::Skills: return "skills";
  }
  return "?";
}

std::set<ContextField> parse_context_fields(std::string_view list) {
  std::set<ContextField> fields;
  for (const auto& raw : split(list, ',')) {
    const auto name = trim(raw);
    if (name.empty()) continue;
    auto it = std::find_if(kFieldOrder.begin(), kFieldOrder.end(),
                           [&](ContextField f) { return to_string(f) == name; });
    if (it == kFieldOrder.end()) throw UsageError("unknown enrichment field '" + std::string(name) + "'");
    fields.insert(*it);
  }
  return fields;
}

Document enrich(const Document& doc, const EnrichmentConfig& config) {
  Document out = doc;
  if (config.n_repeats <= 0) return out;
  for (ContextField field : kFieldOrder) {
    if (!config.fields.contains(field)) continue;
    std::string text;
    switch (field) {
      case ContextField::Title: text = doc.title; break;
      case ContextField::Classification: text = doc.classification; break;
      case ContextField::Location: text = doc.location; break;
      case ContextField::Requirements:
        text = doc.requirements;
        if (text.empty() && config.extract_from_body) text = extract_requirements(doc.body);
        break;
      case ContextField::Skills:
        for (const auto& s : doc.skills) {
          if (s.empty()) continue;
          if (!text.empty()) text.push_back(' ');
          text += s;
        }
        break;
    }
    if (!trim(text).empty()) append_repeated(out.body, text, config.n_repeats);
  }
  return out;
}

std::string extract_requirements(std::string_view body) {
  std::vector<Heading> headings;
  for (std::size_t pos = body.find(':'); pos != std::string_view::npos; pos = body.find(':', pos + 1))
    if (auto h = heading_ending_at(body, pos)) headings.push_back(std::move(*h));

  for (std::size_t i = 0; i < headings.size(); ++i) {
    const auto& name = headings[i].name;
    if (name != "requirements" && name != "qualifications" && name != "skills") continue;
    std::size_t end = body.size();
    for (std::size_t j = i + 1; j < headings.size(); ++j) {
      if (headings[j].start >= headings[i].content_start) {
        end = headings[j].start;
        break;
      }
    }
    return std::string(trim(body.substr(headings[i].content_start, end - headings[i].content_start)));
  }
  return {};
}

}  // namespace coldstart
