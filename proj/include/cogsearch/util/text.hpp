#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cogsearch::text {

// Lowercase ASCII, split on non-alphanumeric bytes. Bytes >= 0x80 are kept
// inside tokens so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view s);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Splits on '.', '!', '?' and newlines; empty pieces are dropped.
std::vector<std::string> split_sentences(std::string_view s);

// Lowercased tokens re-joined by single spaces.
std::string normalize(std::string_view s);

// Case-insensitive substring test.
bool icontains(std::string_view haystack, std::string_view needle);

std::uint64_t fnv1a64(std::string_view s);

// Shortest decimal rendering that round-trips common catalog values
// ("200", "8.5", "0.25").
std::string format_number(double v);

// Replaces every "{key}" in tmpl with the matching value.
std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& vars);

}  // namespace cogsearch::text
