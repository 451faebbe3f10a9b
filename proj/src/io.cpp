#include "rootmle/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace rootmle {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// Data lines with comments and blanks removed, split on commas or whitespace.
std::vector<std::vector<std::string>> tokenize(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> row;
    if (t.find_first_of(",;\t") == std::string::npos) {
      std::istringstream words(t);
      for (std::string w; words >> w;) row.push_back(w);
    } else {
      std::size_t begin = 0;
      for (;;) {
        const std::size_t end = t.find_first_of(",;\t", begin);
        std::string field = trim(t.substr(begin, end == std::string::npos ? std::string::npos : end - begin));
        if (field.empty()) throw InputError("empty field in line '" + t + "'");
        row.push_back(std::move(field));
        if (end == std::string::npos) break;
        begin = end + 1;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_double(const std::string& token) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + token + "'");
  }
  if (used != token.size()) throw InputError("not a number: '" + token + "'");
  return value;
}

std::int64_t parse_int64(const std::string& token) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw InputError("not an integer: '" + token + "'");
  return value;
}

int parse_int(const std::string& token) {
  const std::int64_t v = parse_int64(token);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw InputError("integer out of range: '" + token + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& token) {
  if (token == "true" || token == "1" || token == "yes") return true;
  if (token == "false" || token == "0" || token == "no") return false;
  throw InputError("not a boolean: '" + token + "'");
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

CountMatrix parse_counts_csv(const std::string& text) {
  const auto rows = tokenize(text);
  const Index s = static_cast<Index>(rows.size());
  if (s == 0) throw InputError("count table is empty");
  CountGrid n(s, s);
  for (Index i = 0; i < s; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != s)
      throw InputError("count table must be square; row " + std::to_string(i + 1) + " has " +
                       std::to_string(row.size()) + " entries");
    for (Index j = 0; j < s; ++j) n(i, j) = parse_int64(row[static_cast<std::size_t>(j)]);
  }
  return CountMatrix(n);
}

CountMatrix read_counts_csv(const std::filesystem::path& path) {
  return parse_counts_csv(read_text_file(path));
}

std::string format_counts_csv(const CountMatrix& counts) {
  std::ostringstream out;
  for (Index i = 0; i < counts.states(); ++i) {
    for (Index j = 0; j < counts.states(); ++j) out << (j ? "," : "") << counts(i, j);
    out << '\n';
  }
  return out.str();
}

ConstraintMask parse_mask_csv(const std::string& text) {
  const auto rows = tokenize(text);
  const Index s = static_cast<Index>(rows.size());
  if (s < 2) throw InputError("mask needs at least 2 rows");
  ConstraintMask mask(s);
  for (Index i = 0; i < s; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (row.size() == 1 && row[0] == "absorbing") {
      mask.make_absorbing(i);
      continue;
    }
    if (static_cast<Index>(row.size()) != s - 1)
      throw InputError("mask row " + std::to_string(i + 1) + " needs " + std::to_string(s - 1) +
                       " entries or 'absorbing'");
    for (Index j = 0; j < s - 1; ++j) {
      const std::string& tok = row[static_cast<std::size_t>(j)];
      if (tok == "free") continue;
      mask.fix(i, j, parse_double(tok));
    }
  }
  return mask;
}

ConstraintMask read_mask_csv(const std::filesystem::path& path) {
  return parse_mask_csv(read_text_file(path));
}

std::string format_mask_csv(const ConstraintMask& mask) {
  std::ostringstream out;
  for (Index i = 0; i < mask.states(); ++i) {
    if (mask.is_absorbing(i)) {
      out << "absorbing\n";
      continue;
    }
    for (Index j = 0; j < mask.states() - 1; ++j) {
      out << (j ? "," : "");
      if (mask.is_free(i, j))
        out << "free";
      else
        out << format_double(mask.fixed_value(i, j));
    }
    out << '\n';
  }
  return out.str();
}

Eigen::MatrixXd parse_matrix_csv(const std::string& text) {
  const auto rows = tokenize(text);
  if (rows.empty()) throw InputError("matrix is empty");
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows[0].size());
  Eigen::MatrixXd m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != c) throw InputError("ragged matrix rows");
    for (Index j = 0; j < c; ++j) m(i, j) = parse_double(row[static_cast<std::size_t>(j)]);
  }
  return m;
}

std::string format_matrix_csv(const Eigen::MatrixXd& m, int precision) {
  std::ostringstream out;
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.*g", precision, m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw InputError("line " + std::to_string(number) + ": empty key");
    if (out.count(key)) throw InputError("duplicate key '" + key + "'");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

OptimizerSettings parse_settings(const std::string& text, OptimizerSettings s) {
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "outer_rel_tol") s.outer_rel_tol = parse_double(value);
    else if (key == "inner_abs_tol") s.inner_abs_tol = parse_double(value);
    else if (key == "inner_rel_tol") s.inner_rel_tol = parse_double(value);
    else if (key == "barrier_mu") s.barrier_mu = parse_double(value);
    else if (key == "barrier_reduction") s.barrier_reduction = parse_double(value);
    else if (key == "barrier_schedule") s.barrier_schedule = parse_barrier_schedule(value);
    else if (key == "newton_refine") s.newton_refine = parse_bool(value);
    else if (key == "max_outer_iters") s.max_outer_iters = parse_int(value);
    else if (key == "max_inner_iters") s.max_inner_iters = parse_int(value);
    else throw InputError("unknown setting '" + key + "'");
  }
  s.validate();
  return s;
}

OptimizerSettings read_settings(const std::filesystem::path& path, OptimizerSettings base) {
  return parse_settings(read_text_file(path), base);
}

std::string format_settings(const OptimizerSettings& s) {
  std::ostringstream out;
  out << "outer_rel_tol = " << format_double(s.outer_rel_tol) << '\n'
      << "inner_abs_tol = " << format_double(s.inner_abs_tol) << '\n'
      << "inner_rel_tol = " << format_double(s.inner_rel_tol) << '\n'
      << "barrier_mu = " << format_double(s.barrier_mu) << '\n'
      << "barrier_reduction = " << format_double(s.barrier_reduction) << '\n'
      << "barrier_schedule = " << to_string(s.barrier_schedule) << '\n'
      << "newton_refine = " << (s.newton_refine ? "true" : "false") << '\n'
      << "max_outer_iters = " << s.max_outer_iters << '\n'
      << "max_inner_iters = " << s.max_inner_iters << '\n';
  return out.str();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& row : tokenize(text))
    for (const auto& tok : row) out.push_back(parse_int(tok));
  if (out.empty()) throw InputError("empty integer list");
  return out;
}

std::vector<std::int64_t> parse_int64_list(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& row : tokenize(text))
    for (const auto& tok : row) out.push_back(parse_int64(tok));
  if (out.empty()) throw InputError("empty integer list");
  return out;
}

// Shortest text that reads back to the same double.
std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

}  // namespace rootmle
