#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stirap/config.hpp"
#include "stirap/version.hpp"

namespace stirap {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// In-memory image of one CSV file: a header row plus numeric rows. All CSV
/// written by this tool goes through this type, so emitting a parsed table
/// reproduces the file byte for byte.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

namespace detail {

/// 12 significant digits, the file-format contract. Values parsed back from
/// this representation print to the identical string again.
inline std::string format_value(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

inline std::string short_hash(const std::string& data) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return std::string(buffer).substr(0, 12);
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw io_error("write failed: " + path.string());
}

}  // namespace detail

inline std::string to_csv(const CsvTable& table) {
  std::string text;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) text += ',';
    text += table.columns[c];
  }
  text += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) text += ',';
      text += detail::format_value(row[c]);
    }
    text += '\n';
  }
  return text;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::size_t pos = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= text.size()) return false;
    const std::size_t end = text.find('\n', pos);
    line = text.substr(pos, end == std::string::npos ? end : end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    return true;
  };
  std::string line;
  if (!next_line(line)) throw io_error("csv: missing header row");
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    table.columns.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  while (next_line(line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* cursor = line.c_str();
    for (;;) {
      char* end = nullptr;
      row.push_back(std::strtod(cursor, &end));
      if (end == cursor) throw io_error("csv: malformed numeric field in '" + line + "'");
      cursor = end;
      if (*cursor == ',') {
        ++cursor;
      } else if (*cursor == '\0' || *cursor == '\r') {
        break;
      } else {
        throw io_error("csv: unexpected character in '" + line + "'");
      }
    }
    if (row.size() != table.columns.size())
      throw io_error("csv: row width does not match header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline CsvTable trace_table(const TraceRecord& record) {
  CsvTable table;
  table.columns = {"t_us", "pop_0", "pop_m1", "pop_p1"};
  table.rows.reserve(record.times.size());
  for (std::size_t k = 0; k < record.times.size(); ++k)
    table.rows.push_back({record.times[k], record.populations[k][0],
                          record.populations[k][1], record.populations[k][2]});
  return table;
}

inline CsvTable sweep_table(const SweepRecord& record, const SweepSeries& series) {
  CsvTable table;
  table.columns = record.axis_names;
  table.columns.push_back("efficiency");
  table.columns.push_back("max_intermediate");
  const std::size_t points = series.efficiency.size();
  for (std::size_t k = 0; k < points; ++k) {
    std::vector<double> row;
    for (const auto& axis : record.point_axes) row.push_back(axis[k]);
    row.push_back(series.efficiency[k]);
    row.push_back(series.max_intermediate[k]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline CsvTable preview_table(const PreviewRecord& record) {
  CsvTable table;
  table.columns = {"t_us", "omega_s_mhz_over_2pi", "omega_p_mhz_over_2pi",
                   "abs_omega_a_mhz_over_2pi"};
  for (std::size_t k = 0; k < record.times.size(); ++k)
    table.rows.push_back({record.times[k], rad_per_us_to_mhz(record.omega_s[k]),
                          rad_per_us_to_mhz(record.omega_p[k]),
                          rad_per_us_to_mhz(record.abs_omega_a[k])});
  return table;
}

namespace detail {

inline std::filesystem::path write_csv_with_sidecar(
    const RunConfig& config, const std::string& stem, const std::string& csv_text,
    const std::vector<std::pair<std::string, std::string>>& metadata) {
  namespace fs = std::filesystem;
  if (!fs::exists(config.output_dir))
    throw io_error("output directory does not exist: " + config.output_dir.string());
  const std::string name = stem + "_" + short_hash(csv_text);
  const fs::path csv_path = config.output_dir / (name + ".csv");
  write_file(csv_path, csv_text);

  json sidecar;
  sidecar["version"] = version;
  sidecar["scenario"] = to_string(config.scenario.kind);
  sidecar["config"] = resolved_json(config);
  json extra = json::object();
  for (const auto& [key, value] : metadata) extra[key] = value;
  sidecar["run"] = extra;
  write_file(config.output_dir / (name + ".meta.json"), sidecar.dump(2) + "\n");
  return csv_path;
}

}  // namespace detail

/// Writes the record per the CSV schema plus a sidecar metadata file holding
/// the resolved configuration and software version. The filename encodes the
/// scenario kind and a hash of the file content, so re-emitting an identical
/// record rewrites the identical file.
inline std::vector<std::filesystem::path> emit_csv(const TraceRecord& record,
                                                   const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> metadata;
  metadata.emplace_back("efficiency", detail::format_value(record.efficiency));
  metadata.emplace_back("max_intermediate",
                        detail::format_value(max_intermediate_population(record)));
  const std::string stem = std::string(to_string(config.scenario.kind)) + "_" +
                           to_string(config.scenario.protocol);
  return {detail::write_csv_with_sidecar(config, stem, to_csv(trace_table(record)),
                                         metadata)};
}

inline std::vector<std::filesystem::path> emit_csv(const SweepRecord& record,
                                                   const RunConfig& config) {
  std::vector<std::filesystem::path> written;
  for (const auto& series : record.series) {
    const std::string stem = std::string(to_string(config.scenario.kind)) + "_" +
                             to_string(series.protocol);
    written.push_back(detail::write_csv_with_sidecar(
        config, stem, to_csv(sweep_table(record, series)), record.metadata));
  }
  return written;
}

inline std::vector<std::filesystem::path> emit_csv(const PreviewRecord& record,
                                                   const RunConfig& config) {
  return {detail::write_csv_with_sidecar(config, to_string(config.scenario.kind),
                                         to_csv(preview_table(record)),
                                         record.metadata)};
}

// ---------------------------------------------------------------------------
// Self-contained SVG plots. CSV is the data contract; these are a convenience
// rendering of the same records, with no external renderer involved.
// ---------------------------------------------------------------------------

namespace svg {

inline constexpr double width = 640.0;
inline constexpr double height = 420.0;
inline constexpr double margin_left = 64.0;
inline constexpr double margin_right = 24.0;
inline constexpr double margin_top = 28.0;
inline constexpr double margin_bottom = 52.0;

struct Frame {
  double x_min, x_max, y_min, y_max;
  double x(double v) const {
    return margin_left + (v - x_min) / (x_max - x_min) * (width - margin_left - margin_right);
  }
  double y(double v) const {
    return height - margin_bottom -
           (v - y_min) / (y_max - y_min) * (height - margin_top - margin_bottom);
  }
};

inline std::string number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

inline void open_document(std::string& out, const std::string& title) {
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + number(width) +
         "\" height=\"" + number(height) + "\" viewBox=\"0 0 " + number(width) +
         " " + number(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + number(width / 2) + "\" y=\"18\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">" + title + "</text>\n";
}

inline void axes(std::string& out, const Frame& f, const std::string& x_label,
                 const std::string& y_label) {
  out += "<g stroke=\"black\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + number(margin_left) + "\" y1=\"" + number(height - margin_bottom) +
         "\" x2=\"" + number(width - margin_right) + "\" y2=\"" +
         number(height - margin_bottom) + "\"/>\n";
  out += "<line x1=\"" + number(margin_left) + "\" y1=\"" + number(margin_top) +
         "\" x2=\"" + number(margin_left) + "\" y2=\"" + number(height - margin_bottom) +
         "\"/>\n";
  out += "</g>\n";
  out += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x_min + (f.x_max - f.x_min) * i / 4.0;
    const double yv = f.y_min + (f.y_max - f.y_min) * i / 4.0;
    out += "<text x=\"" + number(f.x(xv)) + "\" y=\"" + number(height - margin_bottom + 16) +
           "\" text-anchor=\"middle\">" + number(xv) + "</text>\n";
    out += "<text x=\"" + number(margin_left - 8) + "\" y=\"" + number(f.y(yv) + 4) +
           "\" text-anchor=\"end\">" + number(yv) + "</text>\n";
  }
  out += "<text x=\"" + number((margin_left + width - margin_right) / 2) + "\" y=\"" +
         number(height - 14) + "\" text-anchor=\"middle\">" + x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + number((margin_top + height - margin_bottom) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         number((margin_top + height - margin_bottom) / 2) + ")\">" + y_label +
         "</text>\n";
  out += "</g>\n";
}

inline void polyline(std::string& out, const Frame& f, const std::vector<double>& xs,
                     const std::vector<double>& ys, const std::string& color,
                     const std::string& css_class) {
  out += "<polyline class=\"" + css_class + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double y = std::clamp(ys[k], f.y_min, f.y_max);
    out += number(f.x(xs[k])) + "," + number(f.y(y)) + " ";
  }
  out += "\"/>\n";
}

inline std::string heat_color(double v) {
  // dark blue (0) to light yellow (1)
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(30 + 225 * v);
  const int g = static_cast<int>(30 + 200 * v);
  const int b = static_cast<int>(120 + 20 * v - 100 * v * v);
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", r, g, b);
  return buffer;
}

}  // namespace svg

inline std::string render_plot(const TraceRecord& record) {
  std::string out;
  svg::Frame f{0.0, record.times.empty() ? 1.0 : record.times.back(), 0.0, 1.0};
  svg::open_document(out, "state populations");
  svg::axes(out, f, "t (us)", "population");
  std::vector<double> p0, pm1, pp1;
  for (const auto& p : record.populations) {
    p0.push_back(p[0]);
    pm1.push_back(p[1]);
    pp1.push_back(p[2]);
  }
  svg::polyline(out, f, record.times, p0, "#d62728", "pop0");
  svg::polyline(out, f, record.times, pm1, "#1f77b4", "popm1");
  svg::polyline(out, f, record.times, pp1, "#2c2c2c", "popp1");
  out += "</svg>\n";
  return out;
}

inline std::string render_plot(const SweepRecord& record) {
  std::string out;
  if (record.shape.size() == 1) {
    const auto& ts = record.point_axes[0];
    svg::Frame f{ts.front(), ts.back(), 0.0, 1.0};  // efficiency axis is [0, 1]
    svg::open_document(out, "transfer efficiency vs duration");
    svg::axes(out, f, record.axis_names[0], "efficiency");
    const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c"};
    int color_index = 0;
    for (const auto& series : record.series) {
      svg::polyline(out, f, ts, series.efficiency, colors[color_index % 3],
                    to_string(series.protocol));
      ++color_index;
    }
    out += "</svg>\n";
    return out;
  }
  // 2D grid: one shaded cell per point, laid out by grid index
  const int rows = record.shape[0];
  const int cols = record.shape[1];
  svg::open_document(out, "transfer efficiency grid");
  const double x0 = svg::margin_left;
  const double y0 = svg::margin_top;
  const double cell_width = (svg::width - svg::margin_left - svg::margin_right) / cols;
  const double cell_height = (svg::height - svg::margin_top - svg::margin_bottom) / rows;
  const auto& eff = record.series.back().efficiency;  // sa series when present
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = eff[i * cols + j];
      out += "<rect class=\"cell\" x=\"" + svg::number(x0 + j * cell_width) +
             "\" y=\"" + svg::number(y0 + (rows - 1 - i) * cell_height) +
             "\" width=\"" + svg::number(cell_width) + "\" height=\"" +
             svg::number(cell_height) + "\" fill=\"" + svg::heat_color(v) + "\"/>\n";
    }
  }
  out += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i < rows; ++i) {
    out += "<text x=\"" + svg::number(svg::margin_left - 6) + "\" y=\"" +
           svg::number(y0 + (rows - 1 - i) * cell_height + cell_height / 2 + 4) +
           "\" text-anchor=\"end\">" +
           svg::number(record.point_axes[0][i * cols]) + "</text>\n";
  }
  for (int j = 0; j < cols; ++j) {
    out += "<text x=\"" + svg::number(x0 + j * cell_width + cell_width / 2) + "\" y=\"" +
           svg::number(svg::height - svg::margin_bottom + 16) +
           "\" text-anchor=\"middle\">" +
           svg::number(record.point_axes[1][j]) + "</text>\n";
  }
  out += "<text x=\"" + svg::number((svg::margin_left + svg::width) / 2) + "\" y=\"" +
         svg::number(svg::height - 14) + "\" text-anchor=\"middle\">" +
         record.axis_names[1] + " (row minimum to maximum)</text>\n";
  out += "<text x=\"16\" y=\"" + svg::number(svg::height / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         svg::number(svg::height / 2) + ")\">" + record.axis_names[0] + "</text>\n";
  out += "</g>\n";
  out += "</svg>\n";
  return out;
}

inline std::string render_plot(const PreviewRecord& record) {
  std::string out;
  double y_max = 0.0;
  for (double v : record.omega_s) y_max = std::max(y_max, rad_per_us_to_mhz(v));
  for (double v : record.omega_p) y_max = std::max(y_max, rad_per_us_to_mhz(v));
  for (double v : record.abs_omega_a) y_max = std::max(y_max, rad_per_us_to_mhz(v));
  svg::Frame f{0.0, record.times.empty() ? 1.0 : record.times.back(), 0.0,
               y_max > 0 ? 1.05 * y_max : 1.0};
  svg::open_document(out, "pulse envelopes");
  svg::axes(out, f, "t (us)", "amplitude / 2pi (MHz)");
  auto to_mhz = [](const std::vector<double>& vs) {
    std::vector<double> out_mhz;
    out_mhz.reserve(vs.size());
    for (double v : vs) out_mhz.push_back(rad_per_us_to_mhz(v));
    return out_mhz;
  };
  svg::polyline(out, f, record.times, to_mhz(record.omega_s), "#2ca02c", "omega_s");
  svg::polyline(out, f, record.times, to_mhz(record.omega_p), "#ff7f0e", "omega_p");
  svg::polyline(out, f, record.times, to_mhz(record.abs_omega_a), "#1f77b4", "omega_a");
  out += "</svg>\n";
  return out;
}

template <typename Record>
std::filesystem::path emit_plot(const Record& record, const RunConfig& config) {
  namespace fs = std::filesystem;
  if (!fs::exists(config.output_dir))
    throw io_error("output directory does not exist: " + config.output_dir.string());
  const std::string text = render_plot(record);
  const std::string name = std::string(to_string(config.scenario.kind)) + "_" +
                           detail::short_hash(text) + ".svg";
  const fs::path path = config.output_dir / name;
  detail::write_file(path, text);
  return path;
}

}  // namespace stirap
