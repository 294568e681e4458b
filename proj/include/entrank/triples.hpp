#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace entrank {

struct Term {
  enum class Kind { iri, blank, literal };

  Kind kind = Kind::iri;
  std::string value;     // IRI, blank label (without "_:"), or unescaped literal text
  std::string datatype;  // literal datatype IRI, if any
  std::string language;  // literal language tag, if any
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;
};

/// Parses one statement line. Blank lines, comment lines and `@prefix`
/// directives yield std::nullopt; a directive is recorded in `prefixes`.
/// `prefix:local` names are expanded through `prefixes`.
///
/// Throws std::invalid_argument describing the first syntax error.
std::optional<Triple> parse_triple_line(std::string_view line,
                                        std::map<std::string, std::string>& prefixes);

/// Escapes a string for use inside a quoted literal.
std::string escape_literal(std::string_view text);

}  // namespace entrank
