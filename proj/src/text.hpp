#pragma once

#include <string>
#include <vector>

namespace sqa {

using TokenSeq = std::vector<std::string>;

// Canonical alias form: lowercase, trimmed, internal whitespace runs
// collapsed to a single space.
std::string normalize_text(const std::string& s);

// Lowercase, whitespace-split, leading/trailing ASCII punctuation stripped
// from each token. Internal apostrophes and hyphens survive. Tokens that
// reduce to nothing are dropped.
TokenSeq tokenize(const std::string& s);

std::string join_tokens(const TokenSeq& tokens);

std::vector<std::string> split(const std::string& s, char sep);

}  // namespace sqa
