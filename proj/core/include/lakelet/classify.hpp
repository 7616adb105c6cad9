#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lakelet/types.hpp"

namespace lakelet {

// Deterministic, total format classification:
//  - a brace/bracket document that parses as JSON is SemiStructured;
//  - at least two lines whose first line splits into >= 2 columns on one of
//    `,` TAB `;` `|`, with the same column count over the first 10 lines, is
//    Structured;
//  - anything else is Unstructured.
FormatClass classify_format(std::string_view payload);

// Delimiter chosen by the Structured rule, if the payload satisfies it.
std::optional<char> detect_delimiter(std::string_view payload);

// Splits one delimited line; double-quoted fields may contain the delimiter
// and use "" for a literal quote.
std::vector<std::string> split_fields(std::string_view line, char delim);

// Non-empty lines of a payload (CR stripped).
std::vector<std::string_view> payload_lines(std::string_view payload, std::size_t limit = 0);

}  // namespace lakelet
