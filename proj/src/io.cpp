#include "nsmhd/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nsmhd/errors.hpp"

namespace nsmhd {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'M', 'H', 'D', 'C', 'H', 'K', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void write_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

json config_to_json(const SimConfig& c) {
  json j;
  j["epsilon"] = c.epsilon;
  j["zeta_v"] = c.zeta_v;
  j["zeta_H"] = c.zeta_H;
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["dim"] = c.grid.dim;
  j["n_tangential"] = c.grid.n_tangential;
  j["n_normal"] = c.grid.n_normal;
  j["ic"] = c.ic_name;
  j["ic_params"] = c.ic_params;
  j["variant"] = to_string(c.variant);
  j["record_every"] = c.record_every;
  j["norm_every"] = c.norm_every;
  j["norm_order"] = c.norm_order;
  j["checkpoint_times"] = c.checkpoint_times;
  j["checkpoint_dir"] = c.checkpoint_dir;
  return j;
}

SimConfig config_from_json(const json& j) {
  SimConfig c;
  c.epsilon = j.at("epsilon").get<double>();
  c.zeta_v = j.at("zeta_v").get<double>();
  c.zeta_H = j.at("zeta_H").get<double>();
  c.dt = j.at("dt").get<double>();
  c.t_end = j.at("t_end").get<double>();
  c.grid.dim = j.at("dim").get<int>();
  c.grid.n_tangential = j.at("n_tangential").get<int>();
  c.grid.n_normal = j.at("n_normal").get<int>();
  c.ic_name = j.at("ic").get<std::string>();
  c.ic_params = j.at("ic_params").get<std::map<std::string, double>>();
  c.variant = variant_from_string(j.at("variant").get<std::string>());
  c.record_every = j.at("record_every").get<int>();
  c.norm_every = j.at("norm_every").get<int>();
  c.norm_order = j.at("norm_order").get<int>();
  c.checkpoint_times = j.at("checkpoint_times").get<std::vector<double>>();
  c.checkpoint_dir = j.at("checkpoint_dir").get<std::string>();
  return c;
}

}  // namespace

void write_checkpoint(const std::string& path, const FieldState& s, const CheckpointMeta& meta) {
  const auto& g = *s.v.grid;
  json h;
  h["version"] = kCheckpointVersion;
  h["dim"] = g.dim();
  h["n_tangential"] = g.nx();
  h["n_normal"] = g.nz();
  h["t"] = s.t;
  h["epsilon"] = meta.epsilon;
  h["zeta_v"] = meta.zeta_v;
  h["zeta_H"] = meta.zeta_H;
  h["variant"] = to_string(meta.variant);
  h["fields"] = {"v", "H"};
  const std::string header = h.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out.write(kMagic, 8);
  write_u64(out, header.size());
  out.write(header.data(), std::streamsize(header.size()));
  // nz x nt column-major is exactly (ix, iy, iz) row-major with iz fastest
  for (const VectorField* f : {&s.v, &s.H})
    for (const auto& c : f->comps)
      out.write(reinterpret_cast<const char*>(c.data()), std::streamsize(c.size() * sizeof(double)));
  if (!out) throw IoError("write failed for checkpoint '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw IoError("'" + path + "' is not a checkpoint");
  const std::uint64_t len = read_u64(in);
  if (!in || len > (1u << 24)) throw IoError("corrupt checkpoint header in '" + path + "'");
  std::string header(len, '\0');
  in.read(header.data(), std::streamsize(len));
  json h;
  try {
    h = json::parse(header);
  } catch (const json::exception& e) {
    throw IoError("corrupt checkpoint header in '" + path + "': " + e.what());
  }
  Checkpoint ck;
  GridSpec spec;
  try {
    if (h.at("version").get<int>() != kCheckpointVersion)
      throw IoError("unsupported checkpoint version in '" + path + "'");
    spec.dim = h.at("dim").get<int>();
    spec.n_tangential = h.at("n_tangential").get<int>();
    spec.n_normal = h.at("n_normal").get<int>();
    ck.state.t = h.at("t").get<double>();
    ck.meta.epsilon = h.at("epsilon").get<double>();
    ck.meta.zeta_v = h.at("zeta_v").get<double>();
    ck.meta.zeta_H = h.at("zeta_H").get<double>();
    ck.meta.variant = variant_from_string(h.at("variant").get<std::string>());
  } catch (const json::exception& e) {
    throw IoError("missing checkpoint metadata in '" + path + "': " + e.what());
  }
  const GridPtr grid = build_grid(spec);
  ck.state.v = VectorField(grid);
  ck.state.H = VectorField(grid);
  for (VectorField* f : {&ck.state.v, &ck.state.H})
    for (auto& c : f->comps)
      in.read(reinterpret_cast<char*>(c.data()), std::streamsize(c.size() * sizeof(double)));
  if (!in) throw IoError("truncated checkpoint '" + path + "'");
  return ck;
}

std::string record_to_json(const RunRecord& r) {
  json j;
  j["format"] = "nsmhd-run-record";
  j["version"] = 1;
  j["config"] = config_to_json(r.config);
  j["dt"] = r.dt;
  j["steps"] = r.steps;
  j["t"] = r.t;
  j["energy"] = r.energy;
  j["strain_v"] = r.strain_v;
  j["strain_H"] = r.strain_H;
  j["wall_v"] = r.wall_v;
  j["wall_H"] = r.wall_H;
  j["energy_rate"] = r.energy_rate;
  j["div_v"] = r.div_v;
  j["div_H"] = r.div_H;
  j["wall_vorticity_v"] = r.wall_vorticity_v;
  j["wall_vorticity_H"] = r.wall_vorticity_H;
  j["cross_helicity"] = r.cross_helicity;
  j["nm_t"] = r.nm_t;
  j["nm"] = r.nm;
  j["nm_parts"] = r.nm_parts;
  j["hessian_v"] = r.hessian_v;
  j["hessian_H"] = r.hessian_H;
  json ck = json::array();
  for (const auto& c : r.checkpoints) ck.push_back({{"t", c.t}, {"path", c.path}});
  j["checkpoints"] = ck;
  return j.dump(1);
}

RunRecord record_from_json(const std::string& text) {
  RunRecord r;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "nsmhd-run-record")
      throw IoError("not a run record");
    r.config = config_from_json(j.at("config"));
    r.dt = j.at("dt").get<double>();
    r.steps = j.at("steps").get<long>();
    auto series = [&](const char* key) { return j.at(key).get<std::vector<double>>(); };
    r.t = series("t");
    r.energy = series("energy");
    r.strain_v = series("strain_v");
    r.strain_H = series("strain_H");
    r.wall_v = series("wall_v");
    r.wall_H = series("wall_H");
    r.energy_rate = series("energy_rate");
    r.div_v = series("div_v");
    r.div_H = series("div_H");
    r.wall_vorticity_v = series("wall_vorticity_v");
    r.wall_vorticity_H = series("wall_vorticity_H");
    r.cross_helicity = series("cross_helicity");
    r.nm_t = series("nm_t");
    r.nm = series("nm");
    r.nm_parts = j.at("nm_parts").get<std::array<std::vector<double>, 6>>();
    r.hessian_v = series("hessian_v");
    r.hessian_H = series("hessian_H");
    for (const auto& c : j.at("checkpoints"))
      r.checkpoints.push_back({c.at("t").get<double>(), c.at("path").get<std::string>()});
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed run record: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("malformed run record: ") + e.what());
  }
  const size_t n = r.t.size();
  for (const auto* s : {&r.energy, &r.strain_v, &r.strain_H, &r.wall_v, &r.wall_H, &r.energy_rate,
                        &r.div_v, &r.div_H, &r.wall_vorticity_v, &r.wall_vorticity_H,
                        &r.cross_helicity})
    if (s->size() != n) throw IoError("malformed run record: series lengths differ");
  for (size_t i = 1; i < n; ++i)
    if (!(r.t[i] > r.t[i - 1])) throw IoError("malformed run record: times not increasing");
  return r;
}

void write_record(const std::string& path, const RunRecord& r) { spill(path, record_to_json(r)); }

RunRecord read_record(const std::string& path) { return record_from_json(slurp(path)); }

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return int(i);
  throw IoError("CSV column '" + name + "' not found");
}

std::string format_double(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double d = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), d);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError("not a number: '" + s + "'");
  return d;
}

std::string to_csv(const CsvTable& t) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\r\n") == std::string::npos) {
        os << c;
        continue;
      }
      os << '"';
      for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
      os << '"';
    }
    os << "\n";
  };
  line(t.header);
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw IoError("CSV row width differs from header");
    line(r);
  }
  return os.str();
}

// RFC 4180: quoted cells may hold commas, doubled quotes and line breaks.
CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false, any = false, first = true;
  auto end_record = [&] {
    cells.push_back(std::move(cell));
    cell.clear();
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) throw IoError("CSV row width differs from header");
      t.rows.push_back(std::move(cells));
    }
    cells.clear();
    any = false;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch != '"') {
        cell += ch;
      } else if (i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else {
        quoted = false;
      }
      continue;
    }
    if (ch == '"') {
      if (!cell.empty()) throw IoError("CSV quote inside an unquoted cell");
      quoted = any = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) end_record();
    } else {
      cell += ch;
      any = true;
    }
  }
  if (quoted) throw IoError("CSV ends inside a quoted cell");
  if (any || !cell.empty()) end_record();
  return t;
}

void write_csv(const std::string& path, const CsvTable& t) { spill(path, to_csv(t)); }

CsvTable read_csv(const std::string& path) { return parse_csv(slurp(path)); }

}  // namespace nsmhd
