#pragma once

// Binary containers for partitioned grids ("JZG1") and appendable solution
// snapshots ("JZS1"), plus the key = value run configuration parser.
//
// All integers and doubles are little-endian. Grid layout:
//   header   "JZG1" u32 version, i32 rank, i32 global[3], i32 offset[3],
//            i32 dims[3], i32 fringe, u32 nsections
//   index    nsections x { char name[8], u64 offset, u64 length }
//   META     u8 fringe[3][2], u8 axis_at_eta0, u8 superposed_zeta
//   COORD    x, y, z blocks over the valid box, ξ fastest
// Solution layout:
//   header   "JZS1" u32 version, i32 rank, i32 dims[3], i32 ncomp
//   records  "SNAP" u64 nbytes, then nbytes of { i64 iteration, f64 time,
//            f64 q[nodes][ncomp] }
//   trailer  "TIDX" u64 count, u64 offset[count], u64 count, "TEND"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jetles/block_array.hpp"
#include "jetles/error.hpp"
#include "jetles/flow_config.hpp"
#include "jetles/grid.hpp"
#include "jetles/numerics.hpp"

namespace jetles {

inline constexpr std::uint32_t kContainerVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) u8(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void u64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) u8(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void tag(const char* t, std::size_t n) { buf_.append(t, n); }
  void name8(const std::string& s) {
    std::string n = s;
    n.resize(8, '\0');
    buf_.append(n);
  }
  std::size_t size() const { return buf_.size(); }
  const std::string& bytes() const { return buf_; }
  void patch_u64(std::size_t at, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) buf_[at + b] = static_cast<char>(static_cast<std::uint8_t>(v >> (8 * b)));
  }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(const std::string& data, std::size_t pos, std::size_t end, std::string section)
      : d_(data), pos_(pos), end_(end), section_(std::move(section)) {}

  void need(std::size_t n) const {
    if (pos_ + n > end_ || pos_ + n > d_.size())
      throw IoError(IoError::Kind::truncated, "truncated " + section_ + " section");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(d_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(d_[pos_ + b])) << (8 * b);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(d_[pos_ + b])) << (8 * b);
    pos_ += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string raw(std::size_t n) {
    need(n);
    std::string s = d_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& d_;
  std::size_t pos_, end_;
  std::string section_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoError::Kind::open, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoError::Kind::open, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(IoError::Kind::open, "write failed for " + path.string());
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// ---------------------------------------------------------------- grids

struct GridContainer {
  int rank = 0;
  CurvilinearBlock block;
};

inline std::string encode_grid(const CurvilinearBlock& b, int rank) {
  detail::ByteWriter meta;
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < 2; ++s) meta.u8(b.topo.fringe[a][s] ? 1 : 0);
  meta.u8(b.topo.axis_at_eta0 ? 1 : 0);
  meta.u8(b.topo.superposed_zeta ? 1 : 0);

  detail::ByteWriter coord;
  const Box vb = b.valid_box();
  for (int c = 0; c < 3; ++c) for_each_node(vb, [&](int i, int j, int k) { coord.f64(b.coords(i, j, k, c)); });

  detail::ByteWriter w;
  w.tag("JZG1", 4);
  w.u32(kContainerVersion);
  w.i32(rank);
  for (int a = 0; a < 3; ++a) w.i32(b.global_dims[a]);
  for (int a = 0; a < 3; ++a) w.i32(b.global_offset[a]);
  for (int a = 0; a < 3; ++a) w.i32(b.dims[a]);
  w.i32(kFringe);
  w.u32(2);
  const std::size_t index_at = w.size();
  const std::size_t entry = 8 + 8 + 8;
  const std::uint64_t meta_off = index_at + 2 * entry;
  const std::uint64_t coord_off = meta_off + meta.size();
  w.name8("META");
  w.u64(meta_off);
  w.u64(meta.size());
  w.name8("COORD");
  w.u64(coord_off);
  w.u64(coord.size());
  std::string out = w.bytes();
  out += meta.bytes();
  out += coord.bytes();
  return out;
}

inline GridContainer decode_grid(const std::string& data, int expected_rank = -1) {
  detail::ByteReader h(data, 0, data.size(), "header");
  if (data.size() >= 4 && data.compare(0, 4, "JZG1") != 0)
    throw IoError(IoError::Kind::magic_mismatch, "not a grid container (bad magic)");
  if (h.raw(4) != "JZG1") throw IoError(IoError::Kind::magic_mismatch, "not a grid container (bad magic)");
  if (h.u32() != kContainerVersion) throw IoError(IoError::Kind::version, "unsupported grid container version");
  GridContainer gc;
  gc.rank = h.i32();
  CurvilinearBlock& b = gc.block;
  b.global_dims = {h.i32(), h.i32(), h.i32()};
  b.global_offset = {h.i32(), h.i32(), h.i32()};
  b.dims = {h.i32(), h.i32(), h.i32()};
  const int fringe = h.i32();
  const std::uint32_t nsec = h.u32();
  if (expected_rank >= 0 && gc.rank != expected_rank)
    throw IoError(IoError::Kind::rank_mismatch,
                  "grid container holds rank " + std::to_string(gc.rank) + ", expected " + std::to_string(expected_rank));
  for (int a = 0; a < 3; ++a)
    if (b.dims[a] < 1 || b.global_dims[a] < b.dims[a] || b.global_offset[a] < 0 ||
        b.global_offset[a] + b.dims[a] > b.global_dims[a])
      throw IoError(IoError::Kind::dimension_mismatch, "inconsistent grid dimensions in header");
  if (fringe != kFringe) throw IoError(IoError::Kind::dimension_mismatch, "unexpected fringe width");

  detail::ByteReader idx(data, h.pos(), data.size(), "section index");
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> sections;
  for (std::uint32_t s = 0; s < nsec; ++s) {
    std::string name = idx.raw(8);
    name = name.substr(0, name.find('\0'));
    const std::uint64_t off = idx.u64();
    const std::uint64_t len = idx.u64();
    sections[name] = {off, len};
  }
  for (const char* need : {"META", "COORD"})
    if (!sections.count(need)) throw IoError(IoError::Kind::format, std::string("missing section ") + need);

  auto [moff, mlen] = sections["META"];
  if (moff + mlen > data.size()) throw IoError(IoError::Kind::truncated, "truncated META section");
  detail::ByteReader meta(data, moff, moff + mlen, "META");
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < 2; ++s) b.topo.fringe[a][s] = meta.u8() != 0;
  b.topo.axis_at_eta0 = meta.u8() != 0;
  b.topo.superposed_zeta = meta.u8() != 0;

  auto [coff, clen] = sections["COORD"];
  const Box vb = b.valid_box();
  std::uint64_t nodes = 1;
  for (int a = 0; a < 3; ++a) nodes *= static_cast<std::uint64_t>(vb.hi[a] - vb.lo[a]);
  if (clen != nodes * 3 * 8)
    throw IoError(IoError::Kind::dimension_mismatch, "COORD payload length does not match header dimensions");
  if (coff + clen > data.size()) throw IoError(IoError::Kind::truncated, "truncated COORD section");
  detail::ByteReader cr(data, coff, coff + clen, "COORD");
  b.coords = BlockArray<3>(b.dims);
  for (int c = 0; c < 3; ++c) for_each_node(vb, [&](int i, int j, int k) { b.coords(i, j, k, c) = cr.f64(); });
  return gc;
}

inline void write_grid(const std::filesystem::path& path, const CurvilinearBlock& b, int rank) {
  detail::write_file(path, encode_grid(b, rank));
}

inline GridContainer read_grid(const std::filesystem::path& path, int expected_rank = -1) {
  return decode_grid(detail::read_file(path), expected_rank);
}

inline std::string grid_file_name(int rank) { return "grid_" + std::to_string(rank) + ".jzg"; }
inline std::string solution_file_name(int rank) { return "solution_" + std::to_string(rank) + ".jzs"; }

// ------------------------------------------------------------- solutions

struct SolutionHeader {
  int rank = 0;
  Extents dims;
  int ncomp = kNcons;
};

struct Snapshot {
  std::int64_t iteration = 0;
  double time = 0.0;
  ConservativeField q;  // interior only
};

struct SolutionFile {
  SolutionHeader header;
  std::vector<Snapshot> snapshots;
  bool trailer_valid = false;
};

namespace detail {

inline constexpr std::size_t kSolutionHeaderBytes = 4 + 4 + 4 + 12 + 4;

inline std::string encode_solution_header(const SolutionHeader& h) {
  ByteWriter w;
  w.tag("JZS1", 4);
  w.u32(kContainerVersion);
  w.i32(h.rank);
  for (int a = 0; a < 3; ++a) w.i32(h.dims[a]);
  w.i32(h.ncomp);
  return w.bytes();
}

inline SolutionHeader decode_solution_header(const std::string& data) {
  if (data.size() >= 4 && data.compare(0, 4, "JZS1") != 0)
    throw IoError(IoError::Kind::magic_mismatch, "not a solution container (bad magic)");
  ByteReader r(data, 0, data.size(), "header");
  r.raw(4);
  if (r.u32() != kContainerVersion) throw IoError(IoError::Kind::version, "unsupported solution container version");
  SolutionHeader h;
  h.rank = r.i32();
  h.dims = {r.i32(), r.i32(), r.i32()};
  h.ncomp = r.i32();
  if (h.ncomp != kNcons || h.dims.nxi < 1 || h.dims.neta < 1 || h.dims.nzeta < 1)
    throw IoError(IoError::Kind::dimension_mismatch, "inconsistent solution header");
  return h;
}

inline std::uint64_t record_payload_bytes(const Extents& d) { return 8 + 8 + d.nodes() * kNcons * 8; }

// Offsets of complete records found by walking from the header.
inline std::vector<std::uint64_t> scan_records(const std::string& data, const SolutionHeader& h) {
  std::vector<std::uint64_t> offs;
  std::size_t pos = kSolutionHeaderBytes;
  const std::uint64_t expect = record_payload_bytes(h.dims);
  while (pos + 12 <= data.size() && data.compare(pos, 4, "SNAP") == 0) {
    ByteReader r(data, pos + 4, data.size(), "record");
    const std::uint64_t len = r.u64();
    if (len != expect || pos + 12 + len > data.size()) break;
    offs.push_back(pos);
    pos += 12 + len;
  }
  return offs;
}

// Trailer offsets if the trailer is intact and consistent, else empty flag.
inline bool parse_trailer(const std::string& data, const SolutionHeader& h, std::vector<std::uint64_t>& offs,
                          std::size_t& trailer_at) {
  if (data.size() < kSolutionHeaderBytes + 24 || data.compare(data.size() - 4, 4, "TEND") != 0) return false;
  ByteReader tail(data, data.size() - 12, data.size(), "trailer");
  const std::uint64_t count = tail.u64();
  const std::uint64_t tlen = 4 + 8 + 8 * count + 8 + 4;
  if (count > data.size() / 8 || tlen > data.size() - kSolutionHeaderBytes) return false;
  trailer_at = data.size() - tlen;
  if (data.compare(trailer_at, 4, "TIDX") != 0) return false;
  ByteReader t(data, trailer_at + 4, data.size(), "trailer");
  if (t.u64() != count) return false;
  offs.clear();
  const std::uint64_t expect = record_payload_bytes(h.dims);
  for (std::uint64_t c = 0; c < count; ++c) {
    const std::uint64_t off = t.u64();
    if (off + 12 + expect > trailer_at || data.compare(off, 4, "SNAP") != 0) return false;
    ByteReader r(data, off + 4, trailer_at, "record");
    if (r.u64() != expect) return false;
    offs.push_back(off);
  }
  return true;
}

inline std::string encode_trailer(const std::vector<std::uint64_t>& offs) {
  ByteWriter w;
  w.tag("TIDX", 4);
  w.u64(offs.size());
  for (auto o : offs) w.u64(o);
  w.u64(offs.size());
  w.tag("TEND", 4);
  return w.bytes();
}

}  // namespace detail

inline void create_solution(const std::filesystem::path& path, int rank, Extents dims) {
  SolutionHeader h{rank, dims, kNcons};
  detail::write_file(path, detail::encode_solution_header(h) + detail::encode_trailer({}));
}

// Appends one record: the old trailer is cut, the record written and
// flushed, then a fresh trailer written. A reader seeing a torn tail falls
// back to scanning complete records.
inline void append_snapshot(const std::filesystem::path& path, const ConservativeField& q, std::int64_t iteration,
                            double time) {
  const std::string data = detail::read_file(path);
  const SolutionHeader h = detail::decode_solution_header(data);
  if (!(q.extents() == h.dims))
    throw IoError(IoError::Kind::dimension_mismatch, "snapshot dimensions " + format_mesh_spec(q.extents()) +
                                                         " do not match container " + format_mesh_spec(h.dims));
  std::vector<std::uint64_t> offs;
  std::size_t end = 0;
  if (!detail::parse_trailer(data, h, offs, end)) {
    offs = detail::scan_records(data, h);
    end = offs.empty() ? detail::kSolutionHeaderBytes
                       : static_cast<std::size_t>(offs.back() + 12 + detail::record_payload_bytes(h.dims));
  }
  std::filesystem::resize_file(path, end);

  detail::ByteWriter rec;
  rec.tag("SNAP", 4);
  rec.u64(detail::record_payload_bytes(h.dims));
  rec.i64(iteration);
  rec.f64(time);
  for_each_node(q.interior(), [&](int i, int j, int k) {
    const double* c = q.at(i, j, k);
    for (int v = 0; v < kNcons; ++v) rec.f64(c[v]);
  });
  offs.push_back(end);
  std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
  if (!f) throw IoError(IoError::Kind::open, "cannot append to " + path.string());
  f.seekp(static_cast<std::streamoff>(end));
  f.write(rec.bytes().data(), static_cast<std::streamsize>(rec.size()));
  f.flush();
  const std::string trailer = detail::encode_trailer(offs);
  f.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
  if (!f) throw IoError(IoError::Kind::open, "append failed for " + path.string());
}

inline SolutionFile decode_solution(const std::string& data, int expected_rank = -1) {
  SolutionFile sf;
  sf.header = detail::decode_solution_header(data);
  if (expected_rank >= 0 && sf.header.rank != expected_rank)
    throw IoError(IoError::Kind::rank_mismatch, "solution container holds rank " + std::to_string(sf.header.rank) +
                                                    ", expected " + std::to_string(expected_rank));
  std::vector<std::uint64_t> offs;
  std::size_t trailer_at = 0;
  sf.trailer_valid = detail::parse_trailer(data, sf.header, offs, trailer_at);
  if (!sf.trailer_valid) offs = detail::scan_records(data, sf.header);
  const Extents d = sf.header.dims;
  for (auto off : offs) {
    detail::ByteReader r(data, off + 12, off + 12 + detail::record_payload_bytes(d), "record");
    Snapshot s;
    s.iteration = r.i64();
    s.time = r.f64();
    s.q = ConservativeField(d);
    for_each_node(s.q.interior(), [&](int i, int j, int k) {
      double* c = s.q.at(i, j, k);
      for (int v = 0; v < kNcons; ++v) c[v] = r.f64();
    });
    sf.snapshots.push_back(std::move(s));
  }
  return sf;
}

inline SolutionFile read_solution(const std::filesystem::path& path, int expected_rank = -1) {
  return decode_solution(detail::read_file(path), expected_rank);
}

// ---------------------------------------------------------- run config

struct RunConfig {
  FlowConfig flow;
  Extents mesh{32, 32, 37};
  bool mesh_given = false;
  std::string grid_dir;
  double length = 30.0;
  double height = 10.0;
  int npx = 1;
  int npz = 1;
  int steps = 100;
  int snapshot_interval = 0;
  std::string out;
  std::vector<std::string> warnings;
};

// Line-oriented `key = value`; `#` starts a comment. `mach` and `dt` are
// required. Unknown keys are errors; a repeated key keeps its last value and
// records a warning. cp and cv follow from gamma and mach unless both given.
inline RunConfig parse_config(const std::string& text) {
  RunConfig rc;
  std::map<std::string, std::pair<std::string, int>> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (kv.count(key)) {
      const std::string w = "warning: duplicate key '" + key + "' on line " + std::to_string(lineno) +
                            " overrides line " + std::to_string(kv[key].second);
      rc.warnings.push_back(w);
      std::cerr << w << '\n';
    }
    kv[key] = {value, lineno};
  }

  auto number = [&](const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': cannot parse number '" + v + "'");
    }
  };
  auto integer = [&](const std::string& key, const std::string& v) {
    const double d = number(key, v);
    if (d != static_cast<double>(static_cast<long long>(d)) || d < 0 || d > 2147483647.0)
      throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
    return static_cast<int>(d);
  };

  for (const char* req : {"mach", "dt"})
    if (!kv.count(req)) throw ConfigError(std::string("missing required key '") + req + "'");

  FlowConfig& f = rc.flow;
  bool cp_given = false, cv_given = false, mu_given = false;
  for (const auto& [key, entry] : kv) {
    const std::string& v = entry.first;
    if (key == "mach") f.mach_jet = number(key, v);
    else if (key == "gamma") f.gamma = number(key, v);
    else if (key == "pr" || key == "prandtl") f.prandtl = number(key, v);
    else if (key == "reynolds" || key == "re") f.reynolds = number(key, v);
    else if (key == "dt") f.dt = number(key, v);
    else if (key == "k2") f.k2 = number(key, v);
    else if (key == "k4") f.k4 = number(key, v);
    else if (key == "s1") f.s1 = number(key, v);
    else if (key == "mu_ref") { f.mu_ref = number(key, v); mu_given = true; }
    else if (key == "t_ref") f.t_ref = number(key, v);
    else if (key == "t0_ref") f.t0_ref = number(key, v);
    else if (key == "cp") { f.cp = number(key, v); cp_given = true; }
    else if (key == "cv") { f.cv = number(key, v); cv_given = true; }
    else if (key == "pressure_ratio") f.pressure_ratio = number(key, v);
    else if (key == "temperature_ratio") f.temperature_ratio = number(key, v);
    else if (key == "mesh") { rc.mesh = parse_mesh_spec(v); rc.mesh_given = true; }
    else if (key == "length") rc.length = number(key, v);
    else if (key == "height") rc.height = number(key, v);
    else if (key == "grid_dir") rc.grid_dir = v;
    else if (key == "npx") rc.npx = integer(key, v);
    else if (key == "npz") rc.npz = integer(key, v);
    else if (key == "steps") rc.steps = integer(key, v);
    else if (key == "snapshot_interval") rc.snapshot_interval = integer(key, v);
    else if (key == "out") rc.out = v;
    else throw ConfigError("unknown key '" + key + "' on line " + std::to_string(entry.second));
  }
  if (cp_given != cv_given) throw ConfigError("cp and cv must be given together");
  if (!cp_given) f.derive_heat_capacities();
  if (!mu_given && kv.count("reynolds")) f.mu_ref = 1.0 / f.reynolds;
  if (!mu_given && kv.count("re")) f.mu_ref = 1.0 / f.reynolds;
  f.validate();
  if (rc.npx < 1 || rc.npz < 1) throw ConfigError("npx and npz must be at least 1");
  return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) { return parse_config(detail::read_file(path)); }

}  // namespace jetles
