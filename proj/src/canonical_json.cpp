#include "atlas/canonical_json.hpp"

#include <cmath>
#include <cstdio>

#include "atlas/errors.hpp"

namespace atlas {

namespace {

void append_indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void append_float(std::string& out, double value) {
  if (!std::isfinite(value)) throw InputError("cannot serialize a non-finite number");
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  std::string text = buffer;
  if (text == "-0.000000") text = "0.000000";
  out += text;
}

void write(std::string& out, const json& value, int depth) {
  switch (value.type()) {
    case json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      // nlohmann's default object is a std::map, so iteration is key-sorted.
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        append_indent(out, depth + 1);
        out += json(it.key()).dump();
        out += ": ";
        write(out, it.value(), depth + 1);
      }
      out += "\n";
      append_indent(out, depth);
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i != 0) out += ",\n";
        append_indent(out, depth + 1);
        write(out, value[i], depth + 1);
      }
      out += "\n";
      append_indent(out, depth);
      out += "]";
      return;
    }
    case json::value_t::number_float:
      append_float(out, value.get<double>());
      return;
    default:
      out += value.dump();
  }
}

}  // namespace

std::string canonical_dump(const json& value) {
  std::string out;
  write(out, value, 0);
  out += "\n";
  return out;
}

double round_to_micro(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  return std::strtod(buffer, nullptr);
}

}  // namespace atlas
