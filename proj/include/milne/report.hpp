#pragma once
// Deterministic CSV / JSON emission.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace milne {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  void add(std::vector<double> row);
  std::string to_string() const;  // header-only when empty
};

// %.17g; inf / -inf / nan spelled out.
std::string format_double(double v);
// Numbers stay numbers; non-finite values become "inf", "-inf", "nan".
nlohmann::ordered_json json_number(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace milne
