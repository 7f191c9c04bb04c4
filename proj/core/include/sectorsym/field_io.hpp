#pragma once

#include <string>

#include "sectorsym/grid.hpp"

namespace sectorsym {

// Two-file field container: `<base>.json` header (format_version, domain,
// grid shape, byte order, dtype, count) plus `<base>.f64` holding raw
// little-endian 8-byte IEEE-754 values, radius-major then angle.
// save followed by load reproduces every value bit-exactly.
void save_field(const std::string& base, const DomainSpec& domain,
                const Field& f);

struct FieldFile {
  DomainSpec domain;
  Field field;
};

// Accepts the container base path or the header path itself.
FieldFile load_field(const std::string& base);

// Binary 8-bit graymap: n_theta rows by n_r columns, linear min-max scaling
// (a constant field maps to black).
void write_pgm(const std::string& path, const Field& f);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace sectorsym
