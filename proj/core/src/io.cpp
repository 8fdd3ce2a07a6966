#include "bbal/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bbal/errors.hpp"

namespace bbal {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, delim)) fields.push_back(field);
  if (!line.empty() && line.back() == delim) fields.emplace_back();
  return fields;
}

}  // namespace

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  auto out = open_out(path);
  for (Eigen::Index d = 0; d < data.dim(); ++d) out << "f" << d << ",";
  out << "label\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index d = 0; d < data.dim(); ++d)
      out << format_g9(data.inputs(i, d)) << ",";
    out << data.labels[static_cast<std::size_t>(i)] << "\n";
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("dataset file is empty (header required): " + path);
  const auto header = split_csv_line(line, ',');
  if (header.empty() || header.back() != "label")
    throw ConfigError("dataset header must end with a 'label' column: " + path);
  const auto dim = static_cast<Eigen::Index>(header.size()) - 1;
  if (dim < 1) throw ConfigError("dataset needs at least one feature column");

  std::vector<double> values;
  std::vector<int> labels;
  int max_label = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, ',');
    if (static_cast<Eigen::Index>(fields.size()) != dim + 1)
      throw ConfigError("dataset row has wrong field count: " + line);
    for (Eigen::Index d = 0; d < dim; ++d)
      values.push_back(std::stod(fields[static_cast<std::size_t>(d)]));
    const int y = std::stoi(fields.back());
    if (y < 0) throw ConfigError("dataset labels must be nonnegative");
    labels.push_back(y);
    max_label = std::max(max_label, y);
  }
  Dataset out;
  out.num_classes = max_label + 1;
  out.labels = std::move(labels);
  out.inputs.resize(static_cast<Eigen::Index>(out.labels.size()), dim);
  for (Eigen::Index i = 0; i < out.inputs.rows(); ++i)
    for (Eigen::Index d = 0; d < dim; ++d)
      out.inputs(i, d) = values[static_cast<std::size_t>(i * dim + d)];
  out.validate();
  return out;
}

void write_landscape_csv(const LandscapeGrid& grid, const std::string& path) {
  auto out = open_out(path);
  const auto g = grid.axis.size();
  for (Eigen::Index j = 0; j < g; ++j) {
    if (j) out << ",";
    out << format_g9(grid.axis(j));
  }
  out << "\n";
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = 0; j < g; ++j) {
      if (j) out << ",";
      out << format_g9(grid.values(i, j));
    }
    out << "\n";
  }
}

void write_history_csv(const LoopHistory& hist, const std::string& path) {
  auto out = open_out(path);
  out << "round,labeled_count,accuracy,acq_seconds,score,indices\n";
  for (const auto& r : hist.rounds) {
    out << r.round << "," << r.labeled_count << "," << format_g9(r.accuracy)
        << "," << format_g9(r.acq_seconds) << "," << format_g9(r.score) << ",";
    for (std::size_t i = 0; i < r.indices.size(); ++i) {
      if (i) out << ";";
      out << r.indices[i];
    }
    out << "\n";
  }
}

LoopHistory read_history_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open history file: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("round,labeled_count,accuracy", 0) != 0)
    throw ConfigError("not a run history CSV: " + path);
  LoopHistory hist;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, ',');
    if (fields.size() != 6)
      throw ConfigError("history row has wrong field count: " + line);
    RoundRecord rec;
    rec.round = std::stoi(fields[0]);
    rec.labeled_count = std::stoi(fields[1]);
    rec.accuracy = std::stod(fields[2]);
    rec.acq_seconds = std::stod(fields[3]);
    rec.score = std::stod(fields[4]);
    for (const auto& tok : split_csv_line(fields[5], ';'))
      if (!tok.empty()) rec.indices.push_back(std::stoi(tok));
    hist.rounds.push_back(std::move(rec));
  }
  return hist;
}

void write_aggregate_csv(const std::vector<LoopHistory>& runs,
                         const std::string& path) {
  auto out = open_out(path);
  out << "round,labeled_count,mean_cum_acq_seconds,mean_accuracy,std_accuracy\n";
  if (runs.empty()) return;
  std::size_t max_rounds = 0;
  for (const auto& r : runs) max_rounds = std::max(max_rounds, r.rounds.size());
  std::vector<double> cum(runs.size(), 0.0);
  for (std::size_t k = 0; k < max_rounds; ++k) {
    double sum_t = 0.0, sum_a = 0.0, sum_a2 = 0.0;
    int n = 0;
    int labeled = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      if (k >= runs[r].rounds.size()) continue;
      const auto& rec = runs[r].rounds[k];
      cum[r] += rec.acq_seconds;
      sum_t += cum[r];
      sum_a += rec.accuracy;
      sum_a2 += rec.accuracy * rec.accuracy;
      labeled = rec.labeled_count;
      ++n;
    }
    if (n == 0) continue;
    const double mean_a = sum_a / n;
    const double var_a = std::max(0.0, sum_a2 / n - mean_a * mean_a);
    out << (k + 1) << "," << labeled << "," << format_g9(sum_t / n) << ","
        << format_g9(mean_a) << "," << format_g9(std::sqrt(var_a)) << "\n";
  }
}

}  // namespace bbal
