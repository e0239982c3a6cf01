#include "cmf/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "cmf/errors.hpp"

namespace cmf {

namespace {

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f64(std::string& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

void append_layer(std::string& out, const BitMatrix& m) {
  const int n = m.size();
  const int bytes_per_row = (n + 7) / 8;
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < bytes_per_row; ++b) {
      unsigned byte = 0;
      for (int k = 0; k < 8; ++k) {
        const int j = b * 8 + k;
        if (j < n && m.get(i, j)) byte |= 1u << k;
      }
      out.push_back(static_cast<char>(byte));
    }
  }
}

class ByteReader {
 public:
  ByteReader(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path_);
    std::ostringstream buf;
    buf << in.rdbuf();
    data_ = std::move(buf).str();
  }

  void expect_magic(const char* magic) {
    if (data_.size() < pos_ + 4 || std::memcmp(data_.data() + pos_, magic, 4) != 0)
      throw ConfigError("bad magic in " + path_ + " (expected " + magic + ")");
    pos_ += 4;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  void read_layer(BitMatrix& m) {
    const int n = m.size();
    const int bytes_per_row = (n + 7) / 8;
    need(static_cast<std::size_t>(n) * bytes_per_row);
    for (int i = 0; i < n; ++i) {
      for (int b = 0; b < bytes_per_row; ++b) {
        const unsigned byte = static_cast<unsigned char>(data_[pos_++]);
        for (int k = 0; k < 8; ++k) {
          const int j = b * 8 + k;
          if (j < n) m.set(i, j, (byte >> k) & 1u);
        }
      }
    }
  }

  void expect_end() const {
    if (pos_ != data_.size()) throw ConfigError("trailing bytes in " + path_);
  }

 private:
  void need(std::size_t count) const {
    if (data_.size() - pos_ < count) throw ConfigError("truncated file: " + path_);
  }

  std::string path_;
  std::string data_;
  std::size_t pos_ = 0;
};

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed: " + path.string());
}

std::ofstream open_text(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  return out;
}

void check_header_dims(std::uint32_t n, std::uint32_t d, std::uint32_t t_plus,
                       const std::filesystem::path& path) {
  if (n < 1 || d < 1 || t_plus < 1) throw ConfigError("degenerate dimensions in " + path.string());
  if (static_cast<std::uint64_t>(n) * d * t_plus > (std::uint64_t{1} << 31))
    throw ConfigError("implausible dimensions in " + path.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_run_binary(const std::filesystem::path& path, const LatentTrajectory& z,
                      const NetworkTrajectory& a) {
  if (z.n != a.n || z.T != a.T) throw std::invalid_argument("write_run_binary: shape mismatch");
  std::string bytes;
  bytes.reserve(20 + z.values.size() * 8 +
                static_cast<std::size_t>(a.T + 1) * a.n * ((a.n + 7) / 8));
  bytes += "CMF1";
  append_u32(bytes, kBinaryFormatVersion);
  append_u32(bytes, static_cast<std::uint32_t>(z.n));
  append_u32(bytes, static_cast<std::uint32_t>(z.d));
  append_u32(bytes, static_cast<std::uint32_t>(z.T));
  for (double v : z.values) append_f64(bytes, v);
  for (const auto& layer : a.layers) append_layer(bytes, layer);
  write_bytes(path, bytes);
}

std::pair<LatentTrajectory, NetworkTrajectory> read_run_binary(const std::filesystem::path& path) {
  ByteReader in(path);
  in.expect_magic("CMF1");
  const std::uint32_t version = in.u32();
  if (version != kBinaryFormatVersion)
    throw ConfigError("unsupported format version in " + path.string());
  const std::uint32_t n = in.u32(), d = in.u32(), T = in.u32();
  check_header_dims(n, d, T + 1, path);
  LatentTrajectory z(static_cast<int>(n), static_cast<int>(d), static_cast<int>(T));
  for (double& v : z.values) v = in.f64();
  NetworkTrajectory a(static_cast<int>(n), static_cast<int>(T));
  for (auto& layer : a.layers) in.read_layer(layer);
  in.expect_end();
  return {std::move(z), std::move(a)};
}

void write_reference_binary(const std::filesystem::path& path, const ReferenceMeasure& ref) {
  std::string bytes;
  bytes.reserve(20 + ref.samples.size() * 8);
  bytes += "CMFR";
  append_u32(bytes, kBinaryFormatVersion);
  append_u32(bytes, static_cast<std::uint32_t>(ref.N));
  append_u32(bytes, static_cast<std::uint32_t>(ref.d));
  append_u32(bytes, static_cast<std::uint32_t>(ref.T));
  for (double v : ref.samples) append_f64(bytes, v);
  write_bytes(path, bytes);
}

ReferenceMeasure read_reference_binary(const std::filesystem::path& path) {
  ByteReader in(path);
  in.expect_magic("CMFR");
  const std::uint32_t version = in.u32();
  if (version != kBinaryFormatVersion)
    throw ConfigError("unsupported format version in " + path.string());
  const std::uint32_t N = in.u32(), d = in.u32(), T = in.u32();
  check_header_dims(N, d, T + 1, path);
  ReferenceMeasure ref(static_cast<int>(N), static_cast<int>(d), static_cast<int>(T));
  for (double& v : ref.samples) v = in.f64();
  in.expect_end();
  return ref;
}

void write_trajectory_csv(const std::filesystem::path& path, const LatentTrajectory& z) {
  std::ofstream out = open_text(path);
  out << "t,i";
  for (int c = 0; c < z.d; ++c) out << ",z" << c;
  out << "\n";
  for (int t = 0; t <= z.T; ++t)
    for (int i = 0; i < z.n; ++i) {
      out << t << "," << i;
      const auto state = z.at(t, i);
      for (int c = 0; c < z.d; ++c) out << "," << format_double(state[static_cast<std::size_t>(c)]);
      out << "\n";
    }
  if (!out) throw ConfigError("write failed: " + path.string());
}

void write_edges_text(const std::filesystem::path& path, const NetworkTrajectory& a) {
  std::ofstream out = open_text(path);
  for (int t = 0; t <= a.T; ++t) {
    const BitMatrix& layer = a.layers[static_cast<std::size_t>(t)];
    for (int i = 0; i < a.n; ++i)
      for (int j = i + 1; j < a.n; ++j)
        if (layer.get(i, j)) out << t << " " << i << " " << j << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

NetworkTrajectory read_edges_text(const std::filesystem::path& path, int n, int T,
                                  bool unit_diagonal) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  NetworkTrajectory a(n, T);
  if (unit_diagonal)
    for (auto& layer : a.layers) layer.fill_diagonal(true);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    long long t = -1, i = -1, j = -1;
    if (!(row >> t >> i >> j) || t < 0 || t > T || i < 0 || j <= i || j >= n)
      throw ConfigError("bad edge row at " + path.string() + ":" + std::to_string(lineno));
    a.layers[static_cast<std::size_t>(t)].set_sym(static_cast<int>(i), static_cast<int>(j), true);
  }
  return a;
}

void write_series_csv(const std::filesystem::path& path, const StatSeries& series) {
  std::ofstream out = open_text(path);
  out << "time,mean,stderr,replicate_count\n";
  const auto mean = series.mean();
  const auto se = series.std_error();
  for (std::size_t t = 0; t < mean.size(); ++t)
    out << t << "," << format_double(mean[t]) << "," << format_double(se[t]) << ","
        << series.replicate_count() << "\n";
  if (!out) throw ConfigError("write failed: " + path.string());
}

void write_series_long_csv(const std::filesystem::path& path, const StatSeries& series) {
  std::ofstream out = open_text(path);
  out << "replicate,time,value\n";
  for (std::size_t r = 0; r < series.values.size(); ++r)
    for (std::size_t t = 0; t < series.values[r].size(); ++t)
      out << r << "," << t << "," << format_double(series.values[r][t]) << "\n";
  if (!out) throw ConfigError("write failed: " + path.string());
}

void write_convergence_csv(const std::filesystem::path& path, const ReferenceDiagnostics& diag) {
  std::ofstream out = open_text(path);
  out << "iteration,disc";
  for (const auto& name : diag.panel_names) out << ",delta_" << name;
  out << "\n";
  for (std::size_t i = 0; i < diag.disc.size(); ++i) {
    out << (i + 1) << "," << format_double(diag.disc[i]);
    for (double delta : diag.deltas[i]) out << "," << format_double(delta);
    out << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

void write_panel_gaps_csv(const std::filesystem::path& path,
                          const std::vector<std::string>& function_names,
                          const std::vector<std::pair<int, std::vector<double>>>& gaps_per_n) {
  std::ofstream out = open_text(path);
  out << "function_name,n,gap\n";
  for (const auto& [n, gaps] : gaps_per_n) {
    if (gaps.size() != function_names.size())
      throw std::invalid_argument("write_panel_gaps_csv: gap count mismatch");
    for (std::size_t f = 0; f < gaps.size(); ++f)
      out << function_names[f] << "," << n << "," << format_double(gaps[f]) << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize k = 0; k < got; ++k) {
      hash ^= static_cast<unsigned char>(buf[k]);
      hash *= 0x100000001b3ull;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

}  // namespace cmf
