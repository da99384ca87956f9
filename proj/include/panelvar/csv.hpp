#pragma once

#include <string>
#include <vector>

namespace panelvar {

// RFC-4180 reader: handles quoted fields, doubled quotes, CRLF, and embedded
// newlines inside quotes. Returns one vector of fields per record. A trailing
// newline does not produce an empty record.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Quotes a field only when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

class CsvWriter {
 public:
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }
  void save(const std::string& path) const { write_text_file(path, out_); }

 private:
  std::string out_;
};

}  // namespace panelvar
