#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace snipsearch {

// Token sequence shared by every retriever. No empty tokens.
using TokenSeq = std::vector<std::string>;

// Lowercases, then splits on any character outside [a-z0-9_]. Bytes above
// 0x7f act as separators, so the output is pure ASCII.
TokenSeq tokenize(std::string_view text);

}  // namespace snipsearch
