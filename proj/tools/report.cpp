#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mtw::report {

std::string format_double(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_into(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += std::string(",") + nl;
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += nl + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += "[";
      if (!flat) out += nl;
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : std::string(",") + nl;
        first = false;
        if (!flat) out += pad;
        dump_into(e, indent, depth + 1, out);
      }
      if (!flat) out += nl + close_pad;
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  out += "\n";
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << content;
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

Csv::Csv(std::vector<std::string> header) : width_(header.size()) {
  for (size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += "\n";
}

void Csv::row(const std::vector<double>& values) {
  if (values.size() != width_) throw std::logic_error("CSV row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + format_double(values[i]);
  text_ += "\n";
}

}  // namespace mtw::report
