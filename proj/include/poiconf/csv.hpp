#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace poiconf {

/// Streaming RFC 4180 reader. Holds one record at a time, so memory stays
/// flat no matter how large the file is. Quoted fields may contain commas,
/// doubled quotes and line breaks. Accepts LF, CRLF or lone CR terminators
/// and skips a UTF-8 BOM. Quoting irregularities (a quote inside an
/// unquoted field, text after a closing quote) are kept literally rather
/// than rejected; the sources are dirty and field-level semantics are
/// validated downstream.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(&in) {}

  /// Parses the next record into `fields` (cleared first). Returns false at
  /// end of input. Blank lines are skipped.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    raw_.clear();
    auto* buf = in_->rdbuf();
    if (!started_) {
      started_ = true;
      skip_bom(buf);
    }

    std::string field;
    bool in_quotes = false;
    bool any_char = false;
    bool field_open = false;  // true once the record has field content

    for (;;) {
      const int ci = buf->sbumpc();
      if (ci == std::char_traits<char>::eof()) {
        in_->setstate(std::ios::eofbit);
        if (!any_char) return false;
        fields.push_back(std::move(field));
        ++record_number_;
        return true;
      }
      const char c = static_cast<char>(ci);

      if (in_quotes) {
        raw_.push_back(c);
        any_char = true;
        if (c == '"') {
          if (buf->sgetc() == '"') {
            buf->sbumpc();
            raw_.push_back('"');
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          field.push_back(c);
        }
        continue;
      }

      if (c == '\r' || c == '\n') {
        if (c == '\r' && buf->sgetc() == '\n') buf->sbumpc();
        if (!any_char) continue;  // blank line
        fields.push_back(std::move(field));
        ++record_number_;
        return true;
      }

      raw_.push_back(c);
      any_char = true;
      if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        field_open = false;
      } else if (c == '"' && !field_open && field.empty()) {
        in_quotes = true;
        field_open = true;
      } else {
        field.push_back(c);
        field_open = true;
      }
    }
  }

  /// Bytes of the most recent record, terminator excluded.
  const std::string& raw_record() const { return raw_; }

  /// 1-based index of the most recent record (blank lines not counted).
  std::size_t record_number() const { return record_number_; }

 private:
  static void skip_bom(std::streambuf* buf) {
    static constexpr unsigned char bom[3] = {0xEF, 0xBB, 0xBF};
    for (int i = 0; i < 3; ++i) {
      const int c = buf->sgetc();
      if (c == std::char_traits<char>::eof() ||
          static_cast<unsigned char>(c) != bom[i]) {
        // Not a BOM: we consumed at most the bytes that matched so far,
        // which can only happen for inputs starting with a BOM prefix;
        // putting them back keeps those exotic inputs intact.
        for (int k = 0; k < i; ++k) buf->sungetc();
        return;
      }
      buf->sbumpc();
    }
  }

  std::istream* in_;
  std::string raw_;
  std::size_t record_number_ = 0;
  bool started_ = false;
};

/// Minimal quoting: a field is quoted only when it contains a comma, a
/// quote or a line break; quotes are escaped by doubling. Records end with
/// '\n'. Deterministic output byte-for-byte.
inline void csv_escape_to(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out += field;
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(&out) {}

  template <typename Range>
  void write_record(const Range& fields) {
    line_.clear();
    bool first = true;
    for (const auto& f : fields) {
      if (!first) line_.push_back(',');
      first = false;
      csv_escape_to(line_, f);
    }
    line_.push_back('\n');
    out_->write(line_.data(), static_cast<std::streamsize>(line_.size()));
  }

 private:
  std::ostream* out_;
  std::string line_;
};

}  // namespace poiconf
