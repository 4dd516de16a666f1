#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "varicheck/problem.hpp"

namespace varicheck {

namespace {

constexpr double kBoundaryTol = 1e-10;

// The problem file is a small key-value document with one [problem] section
// and repeated [[segment]] tables (docs/problem-format.md). Values are
// numbers, quoted strings, or flat arrays of those. Unknown keys and
// sections are rejected.

struct Value {
  enum class Kind { Number, String, Array } kind;
  double number = 0.0;
  std::string str;
  std::vector<Value> items;
};

struct Table {
  std::map<std::string, Value> entries;
  int line = 0;
};

class DocParser {
 public:
  DocParser(const std::string& text, const std::string& origin)
      : text_(text), origin_(origin) {}

  void parse() {
    std::istringstream stream(text_);
    std::string raw;
    Table* current = nullptr;
    while (std::getline(stream, raw)) {
      ++line_;
      std::string line = strip_comment(raw);
      std::size_t i = 0;
      skip_ws(line, i);
      if (i >= line.size()) continue;
      if (line[i] == '[') {
        std::string header = trim(line.substr(i));
        if (header == "[problem]") {
          if (problem_seen_) fail("duplicate [problem] section");
          problem_seen_ = true;
          problem_.line = line_;
          current = &problem_;
        } else if (header == "[[segment]]") {
          segments_.push_back(Table{{}, line_});
          current = &segments_.back();
        } else {
          fail("unknown section '" + header + "'");
        }
        continue;
      }
      if (!current) fail("key outside of any section");
      parse_keyvalue(line, i, *current);
    }
    if (!problem_seen_) fail("missing [problem] section");
  }

  Table& problem() { return problem_; }
  std::vector<Table>& segments() { return segments_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ProblemError(origin_ + ":" + std::to_string(line_) + ": " + msg);
  }

 private:
  static std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') in_string = !in_string;
      if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
  }

  static std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
  }

  static void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
  }

  void parse_keyvalue(const std::string& line, std::size_t i, Table& table) {
    std::size_t start = i;
    while (i < line.size() &&
           (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_'))
      ++i;
    std::string key = line.substr(start, i - start);
    if (key.empty()) fail("expected a key");
    skip_ws(line, i);
    if (i >= line.size() || line[i] != '=') fail("expected '=' after key '" + key + "'");
    ++i;
    skip_ws(line, i);
    Value v = parse_value(line, i);
    skip_ws(line, i);
    if (i < line.size()) fail("trailing characters after value for key '" + key + "'");
    if (!table.entries.emplace(key, std::move(v)).second)
      fail("duplicate key '" + key + "'");
  }

  Value parse_value(const std::string& line, std::size_t& i) {
    if (i >= line.size()) fail("missing value");
    char c = line[i];
    if (c == '"') {
      ++i;
      std::size_t end = line.find('"', i);
      if (end == std::string::npos) fail("unterminated string");
      Value v;
      v.kind = Value::Kind::String;
      v.str = line.substr(i, end - i);
      i = end + 1;
      return v;
    }
    if (c == '[') {
      ++i;
      Value v;
      v.kind = Value::Kind::Array;
      skip_ws(line, i);
      if (i < line.size() && line[i] == ']') {
        ++i;
        return v;
      }
      for (;;) {
        v.items.push_back(parse_value(line, i));
        skip_ws(line, i);
        if (i >= line.size()) fail("unterminated array");
        if (line[i] == ']') {
          ++i;
          return v;
        }
        if (line[i] != ',') fail("expected ',' or ']' in array");
        ++i;
        skip_ws(line, i);
      }
    }
    // number
    const char* begin = line.data() + i;
    const char* end = line.data() + line.size();
    double value = 0.0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{}) fail("malformed value");
    Value v;
    v.kind = Value::Kind::Number;
    v.number = value;
    i += static_cast<std::size_t>(res.ptr - begin);
    return v;
  }

  const std::string& text_;
  std::string origin_;
  int line_ = 0;
  bool problem_seen_ = false;
  Table problem_;
  std::vector<Table> segments_;
};

const Value& require(const Table& t, const std::string& key,
                     const std::string& section, const std::string& origin) {
  auto it = t.entries.find(key);
  if (it == t.entries.end())
    throw ProblemError(origin + ": section " + section + " is missing key '" +
                       key + "'");
  return it->second;
}

double as_number(const Value& v, const std::string& key, const std::string& origin) {
  if (v.kind != Value::Kind::Number)
    throw ProblemError(origin + ": key '" + key + "' must be a number");
  return v.number;
}

std::string as_string(const Value& v, const std::string& key,
                      const std::string& origin) {
  if (v.kind != Value::Kind::String)
    throw ProblemError(origin + ": key '" + key + "' must be a string");
  return v.str;
}

Vec as_number_array(const Value& v, const std::string& key,
                    const std::string& origin) {
  if (v.kind != Value::Kind::Array)
    throw ProblemError(origin + ": key '" + key + "' must be an array");
  Vec out;
  for (const Value& item : v.items) out.push_back(as_number(item, key, origin));
  return out;
}

void reject_unknown(const Table& t, std::initializer_list<const char*> known,
                    const std::string& section, const std::string& origin) {
  for (const auto& [key, value] : t.entries) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok)
      throw ProblemError(origin + ": unknown key '" + key + "' in section " +
                         section);
  }
}

}  // namespace

std::pair<ProblemSpec, PiecewisePath> load_problem_from_string(
    const std::string& text, const std::string& origin) {
  DocParser doc(text, origin);
  doc.parse();

  const Table& prob = doc.problem();
  reject_unknown(prob, {"n", "t0", "t1", "x0", "x1", "lagrangian", "angular_points"},
                 "[problem]", origin);

  double n_raw = as_number(require(prob, "n", "[problem]", origin), "n", origin);
  int n = static_cast<int>(n_raw);
  if (n < 1 || n != n_raw)
    throw ProblemError(origin + ": n must be a positive integer");
  double t0 = as_number(require(prob, "t0", "[problem]", origin), "t0", origin);
  double t1 = as_number(require(prob, "t1", "[problem]", origin), "t1", origin);
  if (!(t0 < t1)) throw ProblemError(origin + ": t0 must be strictly less than t1");

  Vec x0 = as_number_array(require(prob, "x0", "[problem]", origin), "x0", origin);
  if (static_cast<int>(x0.size()) != n)
    throw ProblemError(origin + ": x0 must have n = " + std::to_string(n) +
                       " entries");

  std::optional<Vec> x1;
  const Value& x1v = require(prob, "x1", "[problem]", origin);
  if (x1v.kind == Value::Kind::String) {
    if (x1v.str != "free")
      throw ProblemError(origin + ": x1 must be an array or the string \"free\"");
  } else {
    x1 = as_number_array(x1v, "x1", origin);
    if (static_cast<int>(x1->size()) != n)
      throw ProblemError(origin + ": x1 must have n = " + std::to_string(n) +
                         " entries");
  }

  std::string lagrangian_text =
      as_string(require(prob, "lagrangian", "[problem]", origin), "lagrangian", origin);
  ExprPtr lagrangian;
  try {
    lagrangian = parse_expression(lagrangian_text, n);
  } catch (const ParseError& e) {
    throw ProblemError(origin + ": lagrangian at offset " +
                       std::to_string(e.position()) + ": " + e.what());
  }

  Vec angular;
  if (auto it = prob.entries.find("angular_points"); it != prob.entries.end())
    angular = as_number_array(it->second, "angular_points", origin);

  if (doc.segments().empty())
    throw ProblemError(origin + ": at least one [[segment]] is required");

  struct Seg {
    double from, to;
    std::vector<ExprPtr> comps;
  };
  std::vector<Seg> segs;
  for (const Table& st : doc.segments()) {
    reject_unknown(st, {"from", "to", "x"}, "[[segment]]", origin);
    Seg s;
    s.from = as_number(require(st, "from", "[[segment]]", origin), "from", origin);
    s.to = as_number(require(st, "to", "[[segment]]", origin), "to", origin);
    const Value& xs = require(st, "x", "[[segment]]", origin);
    if (xs.kind != Value::Kind::Array)
      throw ProblemError(origin + ": segment key 'x' must be an array of strings");
    for (const Value& item : xs.items) {
      std::string text_i = as_string(item, "x", origin);
      try {
        s.comps.push_back(parse_expression(text_i, n));
      } catch (const ParseError& e) {
        throw ProblemError(origin + ": segment expression '" + text_i +
                           "' at offset " + std::to_string(e.position()) + ": " +
                           e.what());
      }
    }
    if (static_cast<int>(s.comps.size()) != n)
      throw ProblemError(origin + ": segment must list n = " + std::to_string(n) +
                         " component expressions");
    segs.push_back(std::move(s));
  }

  std::sort(segs.begin(), segs.end(),
            [](const Seg& a, const Seg& b) { return a.from < b.from; });
  const double snap = 1e-9 * (t1 - t0);
  if (std::fabs(segs.front().from - t0) > snap)
    throw ProblemError(origin + ": first segment must start at t0");
  if (std::fabs(segs.back().to - t1) > snap)
    throw ProblemError(origin + ": last segment must end at t1");
  std::vector<double> breaks{t0};
  std::vector<std::vector<ExprPtr>> seg_exprs;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (k > 0 && std::fabs(segs[k].from - segs[k - 1].to) > snap)
      throw ProblemError(origin + ": segments must tile the interval (gap near t=" +
                         std::to_string(segs[k].from) + ")");
    breaks.push_back(k + 1 == segs.size() ? t1 : segs[k].to);
    seg_exprs.push_back(std::move(segs[k].comps));
  }

  PiecewisePath path(std::move(breaks), std::move(seg_exprs), std::move(angular));

  // boundary conditions
  Vec left = path.eval({t0, Side::Plus}, 0);
  for (int i = 0; i < n; ++i)
    if (std::fabs(left[i] - x0[i]) > kBoundaryTol)
      throw ProblemError(origin + ": path(t0) component " + std::to_string(i + 1) +
                         " = " + std::to_string(left[i]) +
                         " does not match x0 entry " + std::to_string(x0[i]));
  if (x1) {
    Vec right = path.eval({t1, Side::Minus}, 0);
    for (int i = 0; i < n; ++i)
      if (std::fabs(right[i] - (*x1)[i]) > kBoundaryTol)
        throw ProblemError(origin + ": path(t1) component " + std::to_string(i + 1) +
                           " = " + std::to_string(right[i]) +
                           " does not match x1 entry " + std::to_string((*x1)[i]));
  }

  ProblemSpec spec{n, t0, t1, std::move(x0), std::move(x1),
                   IntegrandBundle(n, std::move(lagrangian))};
  return {std::move(spec), std::move(path)};
}

std::pair<ProblemSpec, PiecewisePath> load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemError("cannot open problem file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_problem_from_string(buffer.str(), path);
}

}  // namespace varicheck
