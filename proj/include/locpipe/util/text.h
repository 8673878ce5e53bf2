#ifndef LOCPIPE_UTIL_TEXT_H_
#define LOCPIPE_UTIL_TEXT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace locpipe {

std::string Trim(std::string_view s);
std::vector<std::string> SplitWhitespace(std::string_view s);

// Strict full-token numeric parsing; nullopt on any trailing garbage.
std::optional<double> ParseDouble(std::string_view token);
std::optional<long long> ParseInt(std::string_view token);

}  // namespace locpipe

#endif  // LOCPIPE_UTIL_TEXT_H_
