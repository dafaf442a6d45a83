#include "crq/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include <fmt/format.h>

namespace crq {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line_no) {
  s = trim(s);
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError(fmt::format("line {}: '{}' is not a number", line_no, s));
  }
  return v;
}

int parse_int(std::string_view s, std::size_t line_no) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError(fmt::format("line {}: '{}' is not an integer", line_no, s));
  }
  return v;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += fmt::format(".tmp.{}", static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error(fmt::format("cannot rename into '{}'", path.string()));
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_spectral_csv(const SpectralField& field, const ModeSet& modes) {
  if (static_cast<std::size_t>(field.coeffs.size()) != modes.size()) {
    throw std::invalid_argument("format_spectral_csv: field does not match mode set");
  }
  std::string out = fmt::format("# crqflow spectral N={} convention=1\np,q,m,value\n", modes.truncation());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& md = modes[i];
    out += fmt::format("{},{},{},{}\n", md.p, md.q, md.m, format_number(field.coeffs[static_cast<Eigen::Index>(i)]));
  }
  return out;
}

SpectralField parse_spectral_csv(std::string_view text, const ModeSet& modes) {
  const auto lines = lines_of(text);
  if (lines.size() < 2) throw FormatError("spectral CSV: missing header");
  int file_n = -1;
  if (std::sscanf(std::string(lines[0]).c_str(), "# crqflow spectral N=%d convention=1", &file_n) != 1) {
    throw FormatError("spectral CSV: first line must be '# crqflow spectral N=<N> convention=1'");
  }
  if (file_n < 0 || file_n > modes.truncation()) {
    throw FormatError(fmt::format("spectral CSV: file truncation {} exceeds N = {}", file_n, modes.truncation()));
  }
  if (lines[1] != "p,q,m,value") throw FormatError("spectral CSV: second line must be 'p,q,m,value'");
  SpectralField f = SpectralField::zero(modes.truncation());
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    if (cols.size() != 4) throw FormatError(fmt::format("line {}: expected 4 columns", i + 1));
    const int p = parse_int(cols[0], i + 1);
    const int q = parse_int(cols[1], i + 1);
    const int m = parse_int(cols[2], i + 1);
    const double v = parse_double(cols[3], i + 1);
    if (!std::isfinite(v)) throw FormatError(fmt::format("line {}: non-finite coefficient", i + 1));
    if (p < 0 || q < 0 || p + q > file_n || !modes.contains(p, q, m)) {
      throw FormatError(fmt::format("line {}: mode ({},{},{}) outside truncation", i + 1, p, q, m));
    }
    f.coeffs[static_cast<Eigen::Index>(modes.index(p, q, m))] = v;
  }
  return f;
}

std::string format_trajectory_csv(const std::vector<TrajectoryRecord>& records) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", format_number(r.t), format_number(r.energy),
                       format_number(r.grad_norm_sq), format_number(r.volume), format_number(r.r),
                       format_number(r.q_l2), format_number(r.fs42), format_number(r.monotone_qty));
  }
  return out;
}

std::vector<TrajectoryRecord> parse_trajectory_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kTrajectoryHeader) {
    throw FormatError(fmt::format("trajectory CSV: header must be '{}'", kTrajectoryHeader));
  }
  std::vector<TrajectoryRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    if (cols.size() != 8) throw FormatError(fmt::format("line {}: expected 8 columns", i + 1));
    TrajectoryRecord r;
    double* fields[] = {&r.t, &r.energy, &r.grad_norm_sq, &r.volume, &r.r, &r.q_l2, &r.fs42, &r.monotone_qty};
    for (std::size_t c = 0; c < 8; ++c) *fields[c] = parse_double(cols[c], i + 1);
    out.push_back(r);
  }
  if (out.empty()) throw FormatError("trajectory CSV: no data rows");
  return out;
}

std::string format_operator_csv(const OperatorMatrix& op) {
  std::string out = "row,col,value\n";
  const auto& a = op.matrix;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out += fmt::format("{},{},{}\n", i, j, format_number(a(i, j)));
  }
  return out;
}

std::string format_operator_csv(const HermitianOperator& op) {
  std::string out = "row,col,re,im\n";
  const auto& a = op.matrix;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out += fmt::format("{},{},{},{}\n", i, j, format_number(a(i, j).real()), format_number(a(i, j).imag()));
    }
  }
  return out;
}

std::string format_constants_csv(const std::vector<ConstantEstimate>& estimates) {
  std::string out = "name,N,value\n";
  for (const auto& e : estimates) {
    for (const auto& [n, v] : e.trend) out += fmt::format("{},{},{}\n", e.name, n, format_number(v));
  }
  return out;
}

}  // namespace crq
