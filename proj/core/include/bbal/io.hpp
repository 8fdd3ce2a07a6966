#ifndef BBAL_IO_HPP
#define BBAL_IO_HPP

#include <string>
#include <vector>

#include "bbal/dataset.hpp"
#include "bbal/loop.hpp"
#include "bbal/selection.hpp"

namespace bbal {

// All floating-point output uses 9 significant digits with '.' decimal
// separators, independent of locale.
std::string format_g9(double v);

// Dataset CSV: header "f0,...,f{D-1},label", one row per point.
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

// Landscape CSV: header row of axis values, then G rows of G scores;
// values(i, j) corresponds to (x1 = axis[i], x2 = axis[j]).
void write_landscape_csv(const LandscapeGrid& grid, const std::string& path);

// Run history CSV: round,labeled_count,accuracy,acq_seconds,score,indices
// with indices semicolon-joined.
void write_history_csv(const LoopHistory& hist, const std::string& path);
LoopHistory read_history_csv(const std::string& path);

// Aggregate over per-seed histories: per round the mean cumulative
// acquisition time and the mean/stddev accuracy.
void write_aggregate_csv(const std::vector<LoopHistory>& runs,
                         const std::string& path);

}  // namespace bbal

#endif  // BBAL_IO_HPP
