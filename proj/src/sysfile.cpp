#include "normlab/sysfile.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace nlab {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  int value_column = 0;  // 1-based column of the first value character
};

using Sections = std::map<std::string, std::vector<Entry>>;

std::string_view trim(std::string_view s, std::size_t& offset) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  offset = b;
  return s.substr(b, e - b);
}

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

const std::vector<std::string> kSections = {"system", "legendre", "inverse", "force",
                                             "connection", "gauge", "surface", "nu",
                                             "fixture"};

Sections tokenize(std::string_view text) {
  Sections sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    std::size_t lead = 0;
    const std::string_view line = trim(strip_comment(raw), lead);
    if (line.empty()) continue;
    if (line.front() == '[') {
      const std::size_t close = line.find(']');
      if (close == std::string_view::npos)
        throw SyntaxError("unterminated section header", line_no, static_cast<int>(lead) + 1);
      current = std::string(line.substr(1, close - 1));
      if (std::find(kSections.begin(), kSections.end(), current) == kSections.end())
        throw SyntaxError("unknown section [" + current + "]", line_no,
                          static_cast<int>(lead) + 2);
      sections[current];
      std::size_t rest_off = 0;
      const std::string_view rest = trim(line.substr(close + 1), rest_off);
      if (rest.empty()) continue;
      if (rest.front() != '=')
        throw SyntaxError("unexpected text after section header", line_no,
                          static_cast<int>(lead + close + 1 + rest_off) + 1);
      std::size_t voff = 0;
      const std::string_view value = trim(rest.substr(1), voff);
      Entry e{current, std::string(value), line_no,
              static_cast<int>(lead + close + 1 + rest_off + 1 + voff) + 1};
      sections[current].push_back(std::move(e));
      continue;
    }
    if (current.empty())
      throw SyntaxError("entry outside of a section", line_no, static_cast<int>(lead) + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw SyntaxError("expected key = value", line_no, static_cast<int>(lead) + 1);
    std::size_t koff = 0, voff = 0;
    const std::string_view key = trim(line.substr(0, eq), koff);
    std::string_view value = trim(line.substr(eq + 1), voff);
    if (key.empty()) throw SyntaxError("missing key", line_no, static_cast<int>(lead) + 1);
    int column = static_cast<int>(lead + eq + 1 + voff) + 1;
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        throw SyntaxError("unterminated string", line_no, column);
      value = value.substr(1, value.size() - 2);
      ++column;
    }
    sections[current].push_back({std::string(key), std::string(value), line_no, column});
  }
  return sections;
}

Expression parse_at(const Entry& e, int dimension, bool parametric) {
  try {
    return parametric ? parse_parametric(e.value, dimension) : parse(e.value, dimension);
  } catch (const SyntaxError& err) {
    throw SyntaxError(err.detail() + " in '" + e.key + "'", e.line,
                      e.value_column + err.column() - 1);
  } catch (const Error& err) {
    throw SyntaxError(std::string(err.what()) + " in '" + e.key + "'", e.line, e.value_column);
  }
}

double number_at(const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    // Allow constant expressions such as 2*3.14159.
    try {
      return eval_parametric(parse_parametric(e.value, 0), {});
    } catch (const Error&) {
      throw SyntaxError("expected a number for '" + e.key + "'", e.line, e.value_column);
    }
  }
  return v;
}

int integer_at(const Entry& e) {
  const double v = number_at(e);
  if (v != static_cast<double>(static_cast<long long>(v)))
    throw SyntaxError("expected an integer for '" + e.key + "'", e.line, e.value_column);
  return static_cast<int>(v);
}

bool bool_at(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw SyntaxError("expected true or false for '" + e.key + "'", e.line, e.value_column);
}

// "L3" with prefix "L" → 3 (1-based); nullopt when the key does not match.
std::optional<int> indexed(const std::string& key, std::string_view prefix) {
  if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0)
    return std::nullopt;
  int v = 0;
  const char* first = key.data() + prefix.size();
  const char* last = key.data() + key.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return v;
}

// Tensor keys: prefix_k_ij (single-digit i, j) or prefix_k_i_j.
std::optional<std::array<int, 3>> tensor_key(const std::string& key, std::string_view prefix) {
  if (key.size() <= prefix.size() + 1 || key.compare(0, prefix.size(), prefix) != 0 ||
      key[prefix.size()] != '_')
    return std::nullopt;
  std::vector<std::string> parts;
  std::stringstream ss(key.substr(prefix.size() + 1));
  std::string part;
  while (std::getline(ss, part, '_')) parts.push_back(part);
  auto num = [](const std::string& s) -> std::optional<int> {
    if (s.empty()) return std::nullopt;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    return std::stoi(s);
  };
  if (parts.size() == 2 && parts[1].size() == 2) {
    const auto k = num(parts[0]);
    const auto i = num(parts[1].substr(0, 1));
    const auto j = num(parts[1].substr(1, 1));
    if (k && i && j) return std::array<int, 3>{*k, *i, *j};
  }
  if (parts.size() == 3) {
    const auto k = num(parts[0]);
    const auto i = num(parts[1]);
    const auto j = num(parts[2]);
    if (k && i && j) return std::array<int, 3>{*k, *i, *j};
  }
  return std::nullopt;
}

void check_range(int idx, int n, const Entry& e) {
  if (idx < 1 || idx > n)
    throw SyntaxError("index out of range in '" + e.key + "'", e.line, 1);
}

std::vector<Expression> read_tensor(const std::vector<Entry>& entries, std::string_view prefix,
                                    int n) {
  std::vector<Expression> out(sz(n * n * n));
  for (const Entry& e : entries) {
    const auto idx = tensor_key(e.key, prefix);
    if (!idx) throw SyntaxError("unknown key '" + e.key + "'", e.line, 1);
    for (int c : *idx) check_range(c, n, e);
    out[sz((((*idx)[0] - 1) * n + (*idx)[1] - 1) * n + (*idx)[2] - 1)] = parse_at(e, n, false);
  }
  return out;
}

std::vector<Expression> read_vector(const std::vector<Entry>& entries, std::string_view prefix,
                                    int n, std::vector<bool>& seen) {
  std::vector<Expression> out(sz(n));
  seen.assign(sz(n), false);
  for (const Entry& e : entries) {
    const auto idx = indexed(e.key, prefix);
    if (!idx) continue;
    check_range(*idx, n, e);
    out[sz(*idx - 1)] = parse_at(e, n, false);
    seen[sz(*idx - 1)] = true;
  }
  return out;
}

void require_rep(const Expression& e, Representation rep, const char* what) {
  if (e.fiber_rep() && *e.fiber_rep() != rep)
    throw MixedRepresentationError(std::string(what) + " uses the wrong fiber variables");
}

}  // namespace

SystemFile parse_system_text(std::string_view text, bool validate) {
  const Sections sections = tokenize(text);
  auto section = [&](const std::string& name) -> const std::vector<Entry>& {
    static const std::vector<Entry> empty;
    const auto it = sections.find(name);
    return it == sections.end() ? empty : it->second;
  };

  SystemFile file;
  SystemDef& s = file.system;
  for (const Entry& e : section("system")) {
    if (e.key == "n")
      s.n = integer_at(e);
    else if (e.key == "name")
      s.name = e.value;
    else
      throw SyntaxError("unknown key '" + e.key + "' in [system]", e.line, 1);
  }
  if (s.n < 1) throw ValidationError("[system] needs n >= 1");
  const int n = s.n;

  std::optional<Expression> lagrangian;
  std::vector<bool> seen;
  std::vector<Expression> L = read_vector(section("legendre"), "L", n, seen);
  bool any_L = false;
  for (const Entry& e : section("legendre")) {
    if (e.key == "lagrangian")
      lagrangian = parse_at(e, n, false);
    else if (!indexed(e.key, "L"))
      throw SyntaxError("unknown key '" + e.key + "' in [legendre]", e.line, 1);
    else
      any_L = true;
  }
  if (lagrangian && any_L)
    throw ValidationError("[legendre] takes either L components or a lagrangian, not both");
  if (lagrangian) {
    require_rep(*lagrangian, Representation::V, "lagrangian");
    s.L = LegendreMap::from_lagrangian(*lagrangian, n);
  } else {
    if (!any_L) throw ValidationError("[legendre] is missing");
    for (int i = 0; i < n; ++i) {
      if (!seen[sz(i)]) throw ValidationError("[legendre] is missing L" + std::to_string(i + 1));
      require_rep(L[sz(i)], Representation::V, "L");
    }
    s.L = LegendreMap::from_expressions(std::move(L));
  }

  const auto& inverse = section("inverse");
  if (!inverse.empty()) {
    std::vector<bool> seen_v, seen_g;
    std::vector<Expression> V = read_vector(inverse, "V", n, seen_v);
    std::vector<Expression> guess = read_vector(inverse, "guess", n, seen_g);
    for (const Entry& e : inverse)
      if (!indexed(e.key, "V") && !indexed(e.key, "guess"))
        throw SyntaxError("unknown key '" + e.key + "' in [inverse]", e.line, 1);
    auto all = [](const std::vector<bool>& b) {
      return std::all_of(b.begin(), b.end(), [](bool x) { return x; });
    };
    auto none = [](const std::vector<bool>& b) {
      return std::none_of(b.begin(), b.end(), [](bool x) { return x; });
    };
    if (!none(seen_v)) {
      if (!all(seen_v)) throw ValidationError("[inverse] needs all V components");
      for (const Expression& e : V) require_rep(e, Representation::P, "V");
      s.V = std::move(V);
    }
    if (!none(seen_g)) {
      if (!all(seen_g)) throw ValidationError("[inverse] needs all guess components");
      for (const Expression& e : guess) require_rep(e, Representation::P, "guess");
      s.V_guess = std::move(guess);
    }
  }

  s.Phi.assign(sz(n), Expression());
  {
    std::vector<Expression> phi = read_vector(section("force"), "Phi", n, seen);
    for (const Entry& e : section("force"))
      if (!indexed(e.key, "Phi"))
        throw SyntaxError("unknown key '" + e.key + "' in [force]", e.line, 1);
    for (const Expression& e : phi) require_rep(e, Representation::V, "Phi");
    s.Phi = std::move(phi);
  }
  s.Gamma = read_tensor(section("connection"), "Gamma", n);
  for (const Expression& e : s.Gamma) require_rep(e, Representation::V, "Gamma");
  if (sections.count("gauge")) {
    s.T = read_tensor(section("gauge"), "T", n);
    for (const Expression& e : *s.T) require_rep(e, Representation::V, "T");
  }

  for (const Entry& e : section("fixture")) {
    if (e.key == "flip_beta_term") {
      file.vform.flip_beta_term = integer_at(e);
      if (file.vform.flip_beta_term < 0 || file.vform.flip_beta_term > 11)
        throw ValidationError("flip_beta_term must be in 0..11");
    } else if (e.key == "c_collapsed") {
      file.vform.c_collapsed = bool_at(e);
    } else {
      throw SyntaxError("unknown key '" + e.key + "' in [fixture]", e.line, 1);
    }
  }

  if (sections.count("surface")) {
    if (n < 2) throw ValidationError("[surface] needs n >= 2");
    const int k = n - 1;
    ShiftRun run;
    run.surface.assign(sz(n), Expression());
    run.u_min.assign(sz(k), 0.0);
    run.u_max.assign(sz(k), 1.0);
    run.nu = parse_parametric("1", k);
    std::vector<bool> have(sz(n), false);
    for (const Entry& e : section("surface")) {
      std::string key = e.key;
      const std::size_t paren = key.find('(');
      if (paren != std::string::npos) key = key.substr(0, paren);
      if (const auto i = indexed(key, "x")) {
        check_range(*i, n, e);
        run.surface[sz(*i - 1)] = parse_at(e, k, true);
        have[sz(*i - 1)] = true;
        continue;
      }
      bool matched = false;
      for (int d = 1; d <= k && !matched; ++d) {
        const std::string u = "u" + std::to_string(d);
        if (key == u + "_min") {
          run.u_min[sz(d - 1)] = number_at(e);
          matched = true;
        } else if (key == u + "_max") {
          run.u_max[sz(d - 1)] = number_at(e);
          matched = true;
        }
      }
      if (matched) continue;
      if (key == "samples")
        run.samples = integer_at(e);
      else if (key == "t_end")
        run.t_end = number_at(e);
      else if (key == "steps")
        run.steps = integer_at(e);
      else if (key == "rtol")
        run.rtol = number_at(e);
      else
        throw SyntaxError("unknown key '" + e.key + "' in [surface]", e.line, 1);
    }
    for (int i = 0; i < n; ++i)
      if (!have[sz(i)]) throw ValidationError("[surface] is missing x" + std::to_string(i + 1));
    for (const Entry& e : section("nu")) {
      if (e.key != "nu" && e.key != "value")
        throw SyntaxError("unknown key '" + e.key + "' in [nu]", e.line, 1);
      run.nu = parse_at(e, k, true);
    }
    if (run.samples < 1 || run.steps < 1 || !(run.t_end > 0.0))
      throw ValidationError("[surface] needs samples >= 1, steps >= 1 and t_end > 0");
    file.shift = std::move(run);
  }

  if (validate) validate_system(s);
  return file;
}

SystemFile load_system_file(const std::string& path, bool validate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open system file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FileError("cannot read system file '" + path + "'");
  SystemFile file = parse_system_text(buf.str(), validate);
  if (file.system.name.empty()) {
    std::string base = path.substr(path.find_last_of("/\\") + 1);
    file.system.name = base.substr(0, base.find_last_of('.'));
  }
  return file;
}

}  // namespace nlab
