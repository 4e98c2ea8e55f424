#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "robin/types.hpp"

namespace robin {

// Full-precision decimal formatting (17 significant digits) used for every
// numeric CSV column, so identical runs produce byte-identical files.
std::string format_full(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  void write(const std::string& path) const;
  const std::vector<std::string>& header() const { return header_; }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& j);

nlohmann::json complex_json(const Complex& c);
nlohmann::json cmatrix_json(const CMatrix& m);
nlohmann::json cvector_json(const CVector& v);

}  // namespace robin
