#include "invldm/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "invldm/errors.hpp"

namespace invldm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

real_t parse_real(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  real_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("cannot parse complex value '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

std::string format_real(real_t x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(complex_t z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
  return buf;
}

complex_t parse_complex(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw InputError("empty complex value");
  if (s.back() != 'j' && s.back() != 'J') return {parse_real(s, text), 0};
  const std::string_view body = s.substr(0, s.size() - 1);
  // The imaginary part starts at the last sign that is not a leading sign and
  // does not belong to an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) return {0, parse_real(body, text)};
  return {parse_real(body.substr(0, split), text), parse_real(body.substr(split), text)};
}

void write_matrix_csv(std::ostream& os, const ComplexMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << format_complex(m(r, c).value());
    }
    os << '\n';
  }
}

ComplexMatrix read_matrix_csv(std::istream& is) {
  std::vector<std::vector<complex_t>> rows;
  std::string line;
  while (std::getline(is, line)) {
    const std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    std::vector<complex_t> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = l.find(',', start);
      row.push_back(parse_complex(l.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError("ragged CSV matrix: row " + std::to_string(rows.size() + 1) + " has " +
                       std::to_string(row.size()) + " entries, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("CSV matrix has no rows");
  ComplexMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = Complex(rows[r][c]);
  return m;
}

ComplexMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_matrix_csv(in);
}

void write_matrix_csv(const std::string& path, const ComplexMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_matrix_csv(out, m);
}

}  // namespace invldm
