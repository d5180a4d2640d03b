#include "uqlab/app/csv.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "uqlab/error.hpp"
#include "uqlab/text.hpp"

namespace uqlab::app {

namespace {

void check_cell(const std::string& cell) {
  if (cell.find_first_of(";\r\n") != std::string::npos)
    throw DataError("CSV cell contains a separator or line break: '" + cell + "'");
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    check_cell(cells[i]);
    if (i) out += kCsvSeparator;
    out += cells[i];
  }
  out += '\n';
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DataError("CSV has no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numbers(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    try {
      out.push_back(parse_double(row[c], name));
    } catch (const ConfigError& e) {
      throw DataError(e.what());
    }
  }
  return out;
}

std::string emit_csv(const CsvTable& table) {
  if (table.header.empty()) throw DataError("CSV needs a header");
  std::string out;
  for (const std::string& c : table.comments) {
    if (c.find('\n') != std::string::npos) throw DataError("CSV comment contains a line break");
    out += "# " + c + "\n";
  }
  append_row(out, table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw DataError("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                      std::to_string(table.header.size()));
    append_row(out, row);
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t offset = 0;
  bool have_header = false;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) throw ParseError("CSV line is not newline-terminated", offset);
    const std::string_view line = text.substr(offset, end - offset);
    if (!have_header && line.starts_with("#")) {
      table.comments.emplace_back(trim(line.substr(1)));
    } else {
      if (line.empty()) throw ParseError("empty CSV line", offset);
      if (line.find('\r') != std::string_view::npos) throw ParseError("carriage return in CSV line", offset);
      if (line.back() == kCsvSeparator) throw ParseError("trailing separator", offset);
      std::vector<std::string> cells = split(line, kCsvSeparator);
      if (!have_header) {
        for (const auto& h : cells)
          if (h.empty()) throw ParseError("empty header cell", offset);
        table.header = std::move(cells);
        have_header = true;
      } else {
        if (cells.size() != table.header.size())
          throw ParseError("row has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(table.header.size()),
                           offset);
        table.rows.push_back(std::move(cells));
      }
    }
    offset = end + 1;
  }
  if (!have_header) throw ParseError("CSV has no header", text.size());
  return table;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot create '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DataError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace uqlab::app
