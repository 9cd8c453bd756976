#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace mtw::report {

using Json = nlohmann::ordered_json;

// Serializes with insertion-ordered keys and every float at 17 significant
// digits, so identical runs give identical bytes.
std::string dump(const Json& j, int indent = 2);

// Writes to a temporary file next to path and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  std::string str() const { return text_; }

 private:
  size_t width_;
  std::string text_;
};

std::string format_double(double x);

}  // namespace mtw::report
