#include "sectorsym/field_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <vector>

#include <json.hpp>

#include "sectorsym/errors.hpp"

namespace sectorsym {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string strip_json_suffix(const std::string& base) {
  constexpr const char* suffix = ".json";
  if (base.size() > 5 && base.compare(base.size() - 5, 5, suffix) == 0)
    return base.substr(0, base.size() - 5);
  return base;
}

void put_u64_le(std::string& out, std::uint64_t bits) {
  for (int b = 0; b < 8; ++b)
    out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return bits;
}

const ordered_json& need(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw FormatError(std::string("field header: missing key \"") + key + "\"");
  return *it;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);
  return content;
}

void save_field(const std::string& base, const DomainSpec& domain,
                const Field& f) {
  const std::string stem = strip_json_suffix(base);
  ordered_json header;
  header["format_version"] = 1;
  header["domain"] = {{"kind", to_string(domain.kind)},
                      {"r_inner", domain.r_inner},
                      {"r_outer", domain.r_outer}};
  header["N_r"] = f.n_r;
  header["N_theta"] = f.n_theta;
  header["byte_order"] = "little";
  header["dtype"] = "float64";
  header["count"] = f.n_r * f.n_theta;
  write_text_file(stem + ".json", header.dump(2) + "\n");

  std::string payload;
  payload.reserve(static_cast<size_t>(f.v.size()) * 8);
  for (Eigen::Index i = 0; i < f.v.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &f.v[i], 8);
    put_u64_le(payload, bits);
  }
  write_text_file(stem + ".f64", payload);
}

FieldFile load_field(const std::string& base) {
  const std::string stem = strip_json_suffix(base);
  ordered_json header;
  try {
    header = ordered_json::parse(read_text_file(stem + ".json"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field header: not valid JSON: ") + e.what());
  }
  if (!header.is_object()) throw FormatError("field header: not a JSON object");

  static const std::set<std::string> allowed = {
      "format_version", "domain", "N_r", "N_theta",
      "byte_order",     "dtype",  "count"};
  for (auto it = header.begin(); it != header.end(); ++it)
    if (!allowed.count(it.key()))
      throw FormatError("field header: unknown key \"" + it.key() + "\"");

  const auto& ver = need(header, "format_version");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    throw FormatError("field header: format_version must be 1");

  const auto& dom = need(header, "domain");
  if (!dom.is_object())
    throw FormatError("field header: domain must be an object");
  FieldFile out;
  try {
    out.domain.kind =
        domain_kind_from_string(need(dom, "kind").get<std::string>());
    out.domain.r_inner = need(dom, "r_inner").get<double>();
    out.domain.r_outer = need(dom, "r_outer").get<double>();
    out.domain.validate();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("field header: domain: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field header: domain: ") + e.what());
  }

  const auto& nr = need(header, "N_r");
  const auto& nt = need(header, "N_theta");
  if (!nr.is_number_integer() || nr.get<int>() <= 0)
    throw FormatError("field header: N_r must be a positive integer");
  if (!nt.is_number_integer() || nt.get<int>() <= 0)
    throw FormatError("field header: N_theta must be a positive integer");

  if (need(header, "byte_order").get<std::string>() != std::string("little"))
    throw FormatError("field header: byte_order must be \"little\"");
  if (need(header, "dtype").get<std::string>() != std::string("float64"))
    throw FormatError("field header: dtype must be \"float64\"");

  const auto& cnt = need(header, "count");
  if (!cnt.is_number_integer() || cnt.get<long long>() < 0)
    throw FormatError("field header: count must be a nonnegative integer");
  const long long count = cnt.get<long long>();
  if (count != static_cast<long long>(nr.get<int>()) * nt.get<int>())
    throw FormatError("field header: count does not equal N_r * N_theta");

  const std::string payload = read_text_file(stem + ".f64");
  if (payload.size() != static_cast<size_t>(count) * 8)
    throw TruncatedPayload("field payload: expected " +
                           std::to_string(count * 8) + " bytes, found " +
                           std::to_string(payload.size()));

  out.field = Field(nr.get<int>(), nt.get<int>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
  for (long long i = 0; i < count; ++i) {
    const std::uint64_t bits = get_u64_le(bytes + 8 * i);
    std::memcpy(&out.field.v[i], &bits, 8);
  }
  return out;
}

void write_pgm(const std::string& path, const Field& f) {
  double lo = f.v.minCoeff();
  double hi = f.v.maxCoeff();
  const double span = hi - lo;
  std::string body = "P5\n" + std::to_string(f.n_r) + " " +
                     std::to_string(f.n_theta) + "\n255\n";
  body.reserve(body.size() + static_cast<size_t>(f.n_r) * f.n_theta);
  for (int j = 0; j < f.n_theta; ++j)
    for (int i = 0; i < f.n_r; ++i) {
      int px = 0;
      if (span > 0.0) {
        px = static_cast<int>(std::lround(255.0 * (f.at(i, j) - lo) / span));
        px = std::min(255, std::max(0, px));
      }
      body.push_back(static_cast<char>(static_cast<unsigned char>(px)));
    }
  write_text_file(path, body);
}

}  // namespace sectorsym
