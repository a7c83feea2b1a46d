#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace claimsim::detail {

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void row(std::initializer_list<std::string_view> fields) {
    bool first = true;
    for (auto f : fields) {
      if (!first) os_ << ',';
      first = false;
      field(f);
    }
    os_ << "\r\n";
  }

 private:
  void field(std::string_view f) {
    if (f.find_first_of(",\"\r\n") == std::string_view::npos) {
      os_ << f;
      return;
    }
    os_ << '"';
    for (char c : f) {
      if (c == '"') os_ << '"';
      os_ << c;
    }
    os_ << '"';
  }

  std::ostream& os_;
};

}  // namespace claimsim::detail
