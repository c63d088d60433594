#include "thetactl/csv_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "thetactl/config.hpp"
#include "thetactl/errors.hpp"

namespace thetactl {

namespace {

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << header << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << format_real(v);
      first = false;
    }
    out_ << '\n';
  }

  ~CsvWriter() = default;

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty() && item.back() == '\r') item.pop_back();
    fields.push_back(item);
  }
  return fields;
}

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("table " + path.string() + " is empty");
  CsvTable table;
  table.header = split_fields(line);
  if (table.header != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw ConfigError("table " + path.string() + ": expected header '" + want + "'");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != expected.size()) {
      throw ConfigError("table " + path.string() + ": line " + std::to_string(line_no) +
                        " has " + std::to_string(fields.size()) + " columns");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      if (f == "nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        row.push_back(parse_real(f, path.filename().string()));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

std::string time_label(double t) { return format_real(t); }

void write_control_csv(const std::filesystem::path& path, const ControlSignal& u) {
  CsvWriter w(path, "t,u");
  for (std::size_t i = 0; i < u.size(); ++i) {
    w.row({static_cast<double>(i) * u.dt(), u.samples()[i]});
  }
}

ControlSignal read_control_csv(const std::filesystem::path& path, const GridSpec& grid) {
  const CsvTable table = read_csv(path, {"t", "u"});
  if (table.rows.size() != static_cast<std::size_t>(grid.n_steps) + 1) {
    throw ConfigError("control table " + path.string() + ": expected " +
                      std::to_string(grid.n_steps + 1) + " rows, got " +
                      std::to_string(table.rows.size()));
  }
  std::vector<double> samples;
  samples.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!close(table.rows[i][0], grid.time(static_cast<int>(i)))) {
      throw ConfigError("control table " + path.string() + ": row " + std::to_string(i + 1) +
                        " time does not match the grid");
    }
    samples.push_back(table.rows[i][1]);
  }
  ControlSignal u(std::move(samples), grid.dt());
  u.check(grid);
  return u;
}

void write_field_csv(const std::filesystem::path& path, const PhysicalField& f,
                     const GridSpec& grid, const std::string& value_name) {
  CsvWriter w(path, "theta,eta," + value_name);
  for (int j = 0; j < grid.n_eta; ++j) {
    for (int m = 0; m < grid.n_modes; ++m) w.row({grid.theta(m), grid.eta(j), f(j, m)});
  }
}

PhysicalField read_field_csv(const std::filesystem::path& path, const GridSpec& grid,
                             const std::string& value_name) {
  const CsvTable table = read_csv(path, {"theta", "eta", value_name});
  if (table.rows.size() != grid.node_count()) {
    throw ConfigError("field table " + path.string() + ": expected " +
                      std::to_string(grid.node_count()) + " rows, got " +
                      std::to_string(table.rows.size()));
  }
  PhysicalField f(grid);
  std::size_t r = 0;
  for (int j = 0; j < grid.n_eta; ++j) {
    for (int m = 0; m < grid.n_modes; ++m, ++r) {
      const auto& row = table.rows[r];
      if (!close(row[0], grid.theta(m)) || !close(row[1], grid.eta(j))) {
        throw ConfigError("field table " + path.string() + ": row " + std::to_string(r + 2) +
                          " is not at grid node (" + std::to_string(j) + ", " +
                          std::to_string(m) + ")");
      }
      if (!std::isfinite(row[2])) {
        throw ConfigError("field table " + path.string() + ": non-finite value");
      }
      f(j, m) = row[2];
    }
  }
  return f;
}

void write_cost_history_csv(const std::filesystem::path& path, const OptimizeReport& report) {
  CsvWriter w(path, "iter,terminal,running,total,delta");
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (const auto& rec : report.iterations) {
    const double delta = std::isnan(previous) ? previous : previous - rec.cost.total;
    w.row({static_cast<double>(rec.iteration), rec.cost.terminal, rec.cost.running,
           rec.cost.total, delta});
    previous = rec.cost.total;
  }
}

void write_particles_csv(const std::filesystem::path& path, const ParticleEnsemble& ensemble) {
  CsvWriter w(path, "theta,eta");
  for (std::size_t k = 0; k < ensemble.size(); ++k) w.row({ensemble.thetas[k], ensemble.etas[k]});
}

TargetPhase read_target_csv(const std::filesystem::path& path, const GridSpec& grid) {
  const CsvTable table = read_csv(path, {"eta", "target"});
  if (table.rows.size() != grid.slice_count()) {
    throw ConfigError("target table " + path.string() + ": expected " +
                      std::to_string(grid.n_eta) + " rows");
  }
  TargetPhase target;
  for (int j = 0; j < grid.n_eta; ++j) {
    const auto& row = table.rows[static_cast<std::size_t>(j)];
    if (!close(row[0], grid.eta(j))) {
      throw ConfigError("target table " + path.string() + ": eta does not match node " +
                        std::to_string(j));
    }
    target.values.push_back(row[1]);
  }
  target.check(grid);
  return target;
}

void write_target_csv(const std::filesystem::path& path, const TargetPhase& target,
                      const GridSpec& grid) {
  CsvWriter w(path, "eta,target");
  for (int j = 0; j < grid.n_eta; ++j) w.row({grid.eta(j), target.values[static_cast<std::size_t>(j)]});
}

void write_increment_report_csv(const std::filesystem::path& path, double formula, double direct,
                                double rel_gap) {
  CsvWriter w(path, "delta_formula,delta_direct,rel_gap");
  w.row({formula, direct, rel_gap});
}

}  // namespace thetactl
