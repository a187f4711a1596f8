#pragma once

#include <string>
#include <vector>

#include "nsmhd/solver.hpp"

namespace nsmhd {

/// Binary snapshot, see docs/checkpoint_format.md.
///   bytes 0..7   magic "MHDCHK01"
///   bytes 8..15  uint64 little-endian length L of the JSON header
///   next L bytes UTF-8 JSON: version, dim, n_tangential, n_normal, t,
///                epsilon, zeta_v, zeta_H, variant, fields
///   then for v and H, component by component, nz * nt float64 values in
///   row-major node order (ix, iy, iz), iz fastest.
inline constexpr int kCheckpointVersion = 1;

struct CheckpointMeta {
  double epsilon = 0.0;
  double zeta_v = 0.0;
  double zeta_H = 0.0;
  Variant variant = Variant::viscous;
};

struct Checkpoint {
  CheckpointMeta meta;
  FieldState state;
};

void write_checkpoint(const std::string& path, const FieldState& s, const CheckpointMeta& meta);
Checkpoint read_checkpoint(const std::string& path);

std::string record_to_json(const RunRecord& r);
RunRecord record_from_json(const std::string& text);
void write_record(const std::string& path, const RunRecord& r);
RunRecord read_record(const std::string& path);

/// CSV: a header row, then one record per line; cells holding commas, quotes
/// or line breaks are quoted (RFC 4180). Numbers use the shortest decimal
/// form that reads back bit-exactly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
};

std::string format_double(double d);
double parse_double(const std::string& s);

void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);
std::string to_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);

}  // namespace nsmhd
