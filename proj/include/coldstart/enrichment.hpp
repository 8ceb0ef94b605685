#pragma once

#include <set>
#include <string>
#include <string_view>

#include "coldstart/corpus.hpp"

namespace coldstart {

/// Contextual fields, declared in their fixed injection order.
enum class ContextField { Title, Classification, Location, Requirements, Skills };

std::string_view to_string(ContextField field);
/// Parses a comma-separated field list ("title,skills"); throws UsageError.
std::set<ContextField> parse_context_fields(std::string_view list);

struct EnrichmentConfig {
  int n_repeats = 3;
  std::set<ContextField> fields = {ContextField::Title, ContextField::Classification,
                                   ContextField::Location, ContextField::Requirements,
                                   ContextField::Skills};
  /// When a document has no requirements field, fall back to the section
  /// found by extract_requirements() in its body.
  bool extract_from_body = true;
};

/// Returns a copy whose body is followed by n_repeats copies of each selected,
/// non-empty field (fixed field order, single-space separated).
Document enrich(const Document& doc, const EnrichmentConfig& config);

/// Text between the first "requirements" / "qualifications" / "skills"
/// heading and the next heading (or end of text); empty if none matches.
/// Headings are phrases ending in ':' at the start of a line or sentence.
std::string extract_requirements(std::string_view body);

}  // namespace coldstart
