#pragma once

#include <string>
#include <string_view>

namespace sandwich {

enum class OutputFormat { Text, Json };

OutputFormat parse_output_format(std::string_view text);
std::string to_string(OutputFormat format);

}  // namespace sandwich
