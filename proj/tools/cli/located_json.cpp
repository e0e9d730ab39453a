// SPDX-License-Identifier: Apache-2.0
#include "cli/located_json.hpp"

#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "detgeom/error.hpp"

namespace detgeom::cli {

namespace {

using nlohmann::json;

// Forward iterator over the input text that counts consumed newlines.
class CountingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator() = default;
  CountingIterator(const char* p, int* line) : p_(p), line_(line) {}

  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    if (*p_ == '\n') ++*line_;
    ++p_;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator tmp = *this;
    ++*this;
    return tmp;
  }
  bool operator==(const CountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const CountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_ = nullptr;
  int* line_ = nullptr;
};

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

class LocatingSax {
 public:
  LocatingSax(json& root, const int* line,
              std::unordered_map<std::string, int>* lines)
      : dom_(root, true), line_(line), lines_(lines) {}

  bool null() { return primitive([&] { return dom_.null(); }); }
  bool boolean(bool v) { return primitive([&] { return dom_.boolean(v); }); }
  bool number_integer(json::number_integer_t v) {
    return primitive([&] { return dom_.number_integer(v); });
  }
  bool number_unsigned(json::number_unsigned_t v) {
    return primitive([&] { return dom_.number_unsigned(v); });
  }
  bool number_float(json::number_float_t v, const json::string_t& s) {
    return primitive([&] { return dom_.number_float(v, s); });
  }
  bool string(json::string_t& v) {
    return primitive([&] { return dom_.string(v); });
  }
  bool binary(json::binary_t& v) {
    return primitive([&] { return dom_.binary(v); });
  }
  bool start_object(std::size_t n) {
    open(false);
    return dom_.start_object(n);
  }
  bool key(json::string_t& k) {
    frames_.back().key = k;
    lines_->emplace(child_pointer(), *line_);
    return dom_.key(k);
  }
  bool end_object() {
    close();
    return dom_.end_object();
  }
  bool start_array(std::size_t n) {
    open(true);
    return dom_.start_array(n);
  }
  bool end_array() {
    close();
    return dom_.end_array();
  }
  bool parse_error(std::size_t pos, const std::string& tok,
                   const nlohmann::detail::exception& ex) {
    // The DOM parser would rethrow the sliced base class.
    if (const auto* pe = dynamic_cast<const json::parse_error*>(&ex)) throw *pe;
    return dom_.parse_error(pos, tok, ex);
  }

 private:
  struct Frame {
    std::string pointer;
    bool is_array = false;
    std::size_t index = 0;
    std::string key;
  };

  std::string child_pointer() const {
    if (frames_.empty()) return "";
    const Frame& f = frames_.back();
    return f.pointer + "/" +
           (f.is_array ? std::to_string(f.index) : escape_token(f.key));
  }

  template <typename F>
  bool primitive(F&& forward) {
    lines_->emplace(child_pointer(), *line_);
    const bool ok = forward();
    advance();
    return ok;
  }

  void open(bool is_array) {
    const std::string ptr = child_pointer();
    lines_->emplace(ptr, *line_);
    frames_.push_back({ptr, is_array, 0, {}});
  }

  void close() {
    frames_.pop_back();
    advance();
  }

  void advance() {
    if (!frames_.empty() && frames_.back().is_array) ++frames_.back().index;
  }

  nlohmann::detail::json_sax_dom_parser<json> dom_;
  const int* line_;
  std::unordered_map<std::string, int>* lines_;
  std::vector<Frame> frames_;
};

}  // namespace

int LocatedJson::line_of(const std::string& pointer) const {
  std::string p = pointer;
  for (;;) {
    if (auto it = lines.find(p); it != lines.end()) return it->second;
    if (p.empty()) return 1;
    p.erase(p.rfind('/'));
  }
}

std::string LocatedJson::diagnostic(const std::string& pointer,
                                    const std::string& message) const {
  std::ostringstream os;
  os << source << ':' << line_of(pointer) << ": "
     << (pointer.empty() ? "/" : pointer) << ": " << message;
  return os.str();
}

LocatedJson parse_located(const std::string& text, const std::string& source) {
  LocatedJson out;
  out.source = source;
  int line = 1;
  LocatingSax sax(out.doc, &line, &out.lines);
  const char* begin = text.data();
  const char* end = begin + text.size();
  try {
    json::sax_parse(CountingIterator(begin, &line), CountingIterator(end, &line),
                    &sax);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t byte = e.byte == 0 ? 0 : std::min(e.byte - 1, text.size());
    int err_line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++err_line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << source << ':' << err_line << ':' << col << ": malformed JSON: "
       << e.what();
    throw InputError(os.str());
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detgeom::cli
