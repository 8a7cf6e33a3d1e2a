#include "rtbias/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "rtbias/error.hpp"

namespace rtbias::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

struct Line {
  std::size_t number;
  std::string text;
};

std::vector<Line> read_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (trim(text).empty()) continue;
    lines.push_back({number, text});
  }
  return lines;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

Count parse_integer(std::string_view cell, const std::string& source, std::size_t line) {
  Count value = 0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  if (!cell.empty() && cell.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || cell.empty()) {
    parse_error(source, line, "expected an integer, got '" + std::string(cell) + "'");
  }
  return value;
}

double parse_real(std::string_view cell, const std::string& source, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
    parse_error(source, line, "expected a number, got '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buffer, ptr);
}

GroupedSeries read_grouped_csv(std::istream& in, const std::string& source) {
  const auto lines = read_lines(in);
  if (lines.empty()) parse_error(source, 1, "missing header");
  const auto header = split(lines.front().text);
  if (header.size() < 2 || header.front() != "t") {
    parse_error(source, lines.front().number, "header must be 't,<label_0>,...'");
  }
  std::vector<std::string> labels;
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i].empty()) parse_error(source, lines.front().number, "empty group label");
    labels.emplace_back(header[i]);
  }
  const std::size_t L = labels.size();
  std::vector<Count> counts;
  counts.reserve((lines.size() - 1) * L);
  Count origin = 0;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& line = lines[r];
    const auto cells = split(line.text);
    if (cells.size() != L + 1) {
      parse_error(source, line.number, "expected " + std::to_string(L + 1) + " cells, got " +
                                           std::to_string(cells.size()));
    }
    const Count t = parse_integer(cells[0], source, line.number);
    if (r == 1) {
      origin = t;
    } else if (t != origin + static_cast<Count>(r - 1)) {
      throw Error(ErrorCode::NonContiguousTime,
                  source + ":" + std::to_string(line.number) + ": expected t = " +
                      std::to_string(origin + static_cast<Count>(r - 1)) + ", got " +
                      std::to_string(t));
    }
    for (std::size_t l = 0; l < L; ++l) {
      const Count c = parse_integer(cells[l + 1], source, line.number);
      if (c < 0) {
        throw Error(ErrorCode::NegativeCount, source + ":" + std::to_string(line.number) +
                                                  ": negative count " + std::to_string(c) +
                                                  " for group " + labels[l]);
      }
      counts.push_back(c);
    }
  }
  return GroupedSeries(lines.size() - 1, std::move(labels), std::move(counts), origin);
}

GroupedSeries ingest_grouped_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_grouped_csv(in, path.string());
}

void write_grouped_csv(std::ostream& out, const GroupedSeries& series) {
  out << 't';
  for (const auto& label : series.labels()) out << ',' << label;
  out << '\n';
  for (std::size_t t = 0; t < series.times(); ++t) {
    out << series.origin() + static_cast<Count>(t);
    for (const Count c : series.row(t)) out << ',' << c;
    out << '\n';
  }
}

GenerationInterval read_gi_csv(std::istream& in, const std::string& source) {
  const auto lines = read_lines(in);
  if (lines.empty()) parse_error(source, 1, "missing header");
  const auto header = split(lines.front().text);
  if (header.size() != 2 || header[0] != "tau" || header[1] != "prob") {
    parse_error(source, lines.front().number, "header must be 'tau,prob'");
  }
  std::vector<double> probs;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r].text);
    if (cells.size() != 2) parse_error(source, lines[r].number, "expected 2 cells");
    const Count tau = parse_integer(cells[0], source, lines[r].number);
    if (tau != static_cast<Count>(r)) {
      throw Error(ErrorCode::NonContiguousTime, source + ":" + std::to_string(lines[r].number) +
                                                    ": expected tau = " + std::to_string(r));
    }
    probs.push_back(parse_real(cells[1], source, lines[r].number));
  }
  return validate_generation_interval(probs);
}

GenerationInterval load_gi_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_gi_csv(in, path.string());
}

void write_gi_csv(std::ostream& out, const GenerationInterval& gi) {
  out << "tau,prob\n";
  for (std::size_t tau = 1; tau <= gi.max_lag(); ++tau) {
    out << tau << ',' << format_double(gi.at(tau)) << '\n';
  }
}

void write_rt_csv(std::ostream& out, const RtSeries& series) {
  const bool with_quantiles = series.quantiles.has_value();
  out << "t,rt,defined";
  if (with_quantiles) out << ",q_lo,q_med,q_hi";
  out << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.t0 + static_cast<Count>(i) << ',';
    const auto& e = series.estimates[i];
    if (e) out << format_double(*e) << ",1";
    else out << ",0";
    if (with_quantiles) {
      const auto& q = (*series.quantiles)[i];
      if (q) {
        out << ',' << format_double(q->lower) << ',' << format_double(q->median) << ','
            << format_double(q->upper);
      } else {
        out << ",,,";
      }
    }
    out << '\n';
  }
}

void write_optional_series_csv(std::ostream& out, const std::string& column,
                               const std::vector<std::optional<double>>& values, Count origin) {
  out << "t," << column << ",defined\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << origin + static_cast<Count>(i) << ',';
    if (values[i]) out << format_double(*values[i]) << ",1\n";
    else out << ",0\n";
  }
}

void write_latent_draws_csv(std::ostream& out, const LatentPosterior& posterior) {
  if (posterior.samples.empty()) return;
  const auto& first = posterior.samples.front();
  out << "draw,t";
  for (const auto& label : first.labels()) out << ',' << label;
  out << '\n';
  for (std::size_t k = 0; k < posterior.samples.size(); ++k) {
    const auto& draw = posterior.samples[k];
    for (std::size_t t = 0; t < draw.times(); ++t) {
      out << k << ',' << draw.origin() + static_cast<Count>(t);
      for (const Count c : draw.row(t)) out << ',' << c;
      out << '\n';
    }
  }
}

void write_rate_draws_csv(std::ostream& out, const LatentPosterior& posterior) {
  if (!posterior.rate_samples || posterior.samples.empty()) return;
  out << "draw";
  for (const auto& label : posterior.samples.front().labels()) out << ',' << label;
  out << '\n';
  for (std::size_t k = 0; k < posterior.rate_samples->size(); ++k) {
    out << k;
    for (const double r : (*posterior.rate_samples)[k].values()) out << ',' << format_double(r);
    out << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace rtbias::io
