#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "invldm/matrix.hpp"

namespace invldm {

/// "re+imj" with 17 significant digits, e.g. "1.5-0.25j".
std::string format_complex(complex_t z);
/// Accepts "re", "re+imj", "re-imj", "imj". Throws InputError.
complex_t parse_complex(std::string_view text);

/// Full round-trip precision for a real value.
std::string format_real(real_t x);

/// One row per line, comma-separated complex entries. Blank lines and lines
/// starting with '#' are skipped by the reader.
void write_matrix_csv(std::ostream& os, const ComplexMatrix& m);
ComplexMatrix read_matrix_csv(std::istream& is);
ComplexMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const ComplexMatrix& m);

}  // namespace invldm
