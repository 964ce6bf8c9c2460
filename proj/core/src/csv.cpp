#include "audit/csv.hpp"

#include <fstream>
#include <sstream>

#include "audit/errors.hpp"

namespace audit::csv {

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InputError("missing CSV column '" + name + "'");
}

namespace {

// One record may span several physical lines when a quoted field embeds
// a newline.
bool read_record(std::istream& in, std::vector<std::string>& out,
                 const std::string& source, std::size_t& line_no) {
  out.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw InputError(source + ":" + std::to_string(line_no) +
                           ": quote inside unquoted field");
        }
        in_quotes = true;
        break;
      case ',':
        out.push_back(std::move(field));
        field.clear();
        break;
      case '\r':
        break;
      case '\n':
        ++line_no;
        out.push_back(std::move(field));
        return true;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw InputError(source + ": unterminated quoted field");
  }
  if (!any) return false;
  out.push_back(std::move(field));
  return true;
}

}  // namespace

Table parse(std::istream& in, const std::string& source_name) {
  Table t;
  std::size_t line_no = 1;
  std::vector<std::string> record;
  if (!read_record(in, record, source_name, line_no)) {
    throw InputError(source_name + ": empty CSV (no header)");
  }
  t.header = record;
  while (read_record(in, record, source_name, line_no)) {
    // A blank line cannot be data in a multi-column table; in a
    // single-column table it is a row holding one empty field.
    if (record.size() == 1 && record[0].empty() && t.header.size() > 1) continue;
    if (record.size() != t.header.size()) {
      throw InputError(source_name + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(t.header.size()) +
                       " fields, got " + std::to_string(record.size()));
    }
    t.rows.push_back(record);
  }
  return t;
}

Table parse_string(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  return parse(in, source_name);
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse(in, path);
}

std::string escape(const std::string& field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace audit::csv
