#include "larche/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace larche::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path with_ext(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
  return r;
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed json in " + p.string() + ": " + e.what());
  }
}

std::string frame_stem(int k, const std::string& field) {
  std::ostringstream s;
  s << std::setw(4) << std::setfill('0') << k << '_' << field;
  return s.str();
}

}  // namespace

void write_field(const Field& f, const fs::path& stem, double time, const std::string& name) {
  const Grid2D& g = f.grid();
  {
    std::ofstream out(with_ext(stem, ".f64"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + with_ext(stem, ".f64").string());
    for (double v : f.values()) {
      const std::uint64_t le = to_le(std::bit_cast<std::uint64_t>(v));
      out.write(reinterpret_cast<const char*>(&le), sizeof le);
    }
  }
  const json meta{{"nx", g.nx()}, {"ny", g.ny()}, {"Lx", g.Lx()}, {"Ly", g.Ly()}, {"time", time}, {"field", name}};
  std::ofstream side(with_ext(stem, ".json"));
  if (!side) throw std::runtime_error("cannot write " + with_ext(stem, ".json").string());
  side << meta.dump(2) << '\n';
}

Field read_field(const fs::path& stem, FieldMeta* meta) {
  const json j = read_json(with_ext(stem, ".json"));
  FieldMeta m;
  try {
    m.nx = j.at("nx").get<int>();
    m.ny = j.at("ny").get<int>();
    m.Lx = j.at("Lx").get<double>();
    m.Ly = j.at("Ly").get<double>();
    m.time = j.at("time").get<double>();
    m.field = j.at("field").get<std::string>();
  } catch (const json::exception& e) {
    throw std::runtime_error("bad sidecar " + with_ext(stem, ".json").string() + ": " + e.what());
  }
  Field f(Grid2D(m.nx, m.ny, m.Lx, m.Ly));
  const fs::path raw = with_ext(stem, ".f64");
  std::ifstream in(raw, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + raw.string());
  if (fs::file_size(raw) != f.size() * sizeof(double))
    throw std::runtime_error("size of " + raw.string() + " does not match its sidecar");
  for (double& v : f.values()) {
    std::uint64_t le = 0;
    in.read(reinterpret_cast<char*>(&le), sizeof le);
    v = std::bit_cast<double>(to_le(le));
  }
  if (meta) *meta = m;
  return f;
}

void write_time_series(const Trajectory& tr, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "t,mass,E1,E2,Etot,max_abs_c\n" << std::setprecision(17);
  for (std::size_t k = 0; k < tr.t.size(); ++k)
    f << tr.t[k] << ',' << tr.mass[k] << ',' << tr.E1[k] << ',' << tr.E2[k] << ',' << tr.Etot[k] << ','
      << tr.max_abs_c[k] << '\n';
}

void write_trajectory(const Trajectory& tr, const fs::path& dir) {
  fs::create_directories(dir / "frames");
  write_time_series(tr, dir / "timeseries.csv");
  json index = json::array();
  for (std::size_t k = 0; k < tr.frames.size(); ++k) {
    const PFState& s = tr.frames[k];
    const int i = static_cast<int>(k);
    write_field(s.c, dir / "frames" / frame_stem(i, "c"), s.time, "c");
    write_field(s.mu, dir / "frames" / frame_stem(i, "mu"), s.time, "mu");
    json entry{{"frame", i}, {"time", s.time}, {"fields", {"c", "mu"}}};
    if (k < tr.contours.size()) {
      write_polyline_csv(tr.contours[k], (dir / "frames" / (frame_stem(i, "contour") + ".csv")).string());
      entry["contour"] = frame_stem(i, "contour") + ".csv";
    }
    index.push_back(entry);
  }
  std::ofstream f(dir / "frames.json");
  f << index.dump(2) << '\n';
}

std::vector<FrameDiff> compare_runs(const fs::path& a, const fs::path& b) {
  const json ia = read_json(a / "frames.json"), ib = read_json(b / "frames.json");
  if (ia.size() != ib.size()) throw std::runtime_error("compare: runs have different frame counts");
  std::vector<FrameDiff> out;
  for (std::size_t k = 0; k < ia.size(); ++k) {
    const double ta = ia[k].at("time").get<double>(), tb = ib[k].at("time").get<double>();
    if (std::abs(ta - tb) > 1e-12 * (1.0 + std::abs(ta)))
      throw std::runtime_error("compare: sample times differ at frame " + std::to_string(k));
    const int i = ia[k].at("frame").get<int>();
    for (const auto& name : ia[k].at("fields")) {
      const std::string fld = name.get<std::string>();
      const Field fa = read_field(a / "frames" / frame_stem(i, fld));
      const Field fb = read_field(b / "frames" / frame_stem(ib[k].at("frame").get<int>(), fld));
      if (!(fa.grid() == fb.grid())) throw std::runtime_error("compare: grid mismatch in field " + fld);
      const Grid2D& g = fa.grid();
      FrameDiff d{i, ta, fld};
      double s2 = 0.0, s3 = 0.0;
      for (int y = 0; y < g.ny(); ++y)
        for (int x = 0; x < g.nx(); ++x) {
          const double e = std::abs(fa(x, y) - fb(x, y)), w = g.node_weight(x, y);
          s2 += w * e * e;
          s3 += w * e * e * e;
          d.max = std::max(d.max, e);
        }
      d.l2 = std::sqrt(s2);
      d.l3 = std::cbrt(s3);
      out.push_back(d);
    }
  }
  return out;
}

void write_csv(const std::vector<FrameDiff>& d, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "frame,time,field,l2,l3,max\n" << std::setprecision(17);
  for (const auto& r : d) f << r.frame << ',' << r.time << ',' << r.field << ',' << r.l2 << ',' << r.l3 << ',' << r.max << '\n';
}

}  // namespace larche::io
