#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rtbias/bayes_latent.hpp"
#include "rtbias/core.hpp"

namespace rtbias::io {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

// Grouped series: header `t,<label_0>,...`, one row per time step.
GroupedSeries read_grouped_csv(std::istream& in, const std::string& source = "<input>");
GroupedSeries ingest_grouped_csv(const std::filesystem::path& path);
void write_grouped_csv(std::ostream& out, const GroupedSeries& series);

// Generation interval: header `tau,prob`, rows tau = 1..T_max.
GenerationInterval read_gi_csv(std::istream& in, const std::string& source = "<input>");
GenerationInterval load_gi_csv(const std::filesystem::path& path);
void write_gi_csv(std::ostream& out, const GenerationInterval& gi);

/// `t,rt,defined` plus `q_lo,q_med,q_hi` when quantiles are present. Absent
/// estimates leave the value cells empty and write defined = 0.
void write_rt_csv(std::ostream& out, const RtSeries& series);

/// `t,value,defined` for a per-time optional series starting at `origin`.
void write_optional_series_csv(std::ostream& out, const std::string& column,
                               const std::vector<std::optional<double>>& values, Count origin);

/// Latent draws as `draw,t,<labels...>`; rate draws as `draw,<labels...>`.
void write_latent_draws_csv(std::ostream& out, const LatentPosterior& posterior);
void write_rate_draws_csv(std::ostream& out, const LatentPosterior& posterior);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Writes via a stringstream so a failing writer leaves no partial file.
template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer);

}  // namespace rtbias::io

#include <sstream>

template <class Writer>
void rtbias::io::write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream buffer;
  writer(buffer);
  write_text_file(path, buffer.str());
}
