#ifndef BBAL_LOOP_HPP
#define BBAL_LOOP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bbal/acquisition.hpp"
#include "bbal/dataset.hpp"
#include "bbal/gp.hpp"
#include "bbal/rff.hpp"

namespace bbal {

enum class SurrogateKind { kGpProbit, kRffSoftmax };
enum class AcquisitionKind { kBbb, kBatchBald, kBaldTopB, kRandom };
enum class BbbPath { kAnalytic, kSampled };

struct LoopConfig {
  SurrogateKind surrogate = SurrogateKind::kRffSoftmax;
  KernelParams gp_params;
  RffConfig rff;

  AcquisitionKind acquisition = AcquisitionKind::kBbb;
  BbbPath bbb_path = BbbPath::kSampled;
  JointMode batchbald_mode = JointMode::kMonteCarlo;

  int initial_count = 20;
  int batch_size = 10;
  int rounds = 10;
  // Runs extra rounds until at least this many points are labeled (0 = off);
  // the budget is whichever of rounds/min_points asks for more.
  int min_points = 0;
  int sample_count = 100;  // posterior draws S for sampled paths
  int mc_configs = 512;    // Monte Carlo configurations M for BatchBALD

  std::uint64_t seed = 1;

  void validate() const;
};

struct RoundRecord {
  int round = 0;          // 1-based
  int labeled_count = 0;  // after this round's reveal
  double accuracy = 0.0;  // test accuracy of the pre-acquisition fit
  double acq_seconds = 0.0;
  double score = 0.0;
  std::vector<int> indices;  // pool indices acquired this round
};

struct LoopHistory {
  std::vector<RoundRecord> rounds;
  bool pool_exhausted = false;
};

// Pool-based active learning at desk scale: per round fit the surrogate on
// the labeled set, score/select batch_size pool points, reveal their labels.
// Timing covers selection (including posterior sampling for sampled paths)
// and excludes surrogate fitting. The test set is only ever used for the
// accuracy metric.
LoopHistory run_loop(const Dataset& pool, const Dataset& test,
                     const LoopConfig& cfg);

std::string to_string(SurrogateKind k);
std::string to_string(AcquisitionKind k);
std::string to_string(BbbPath p);

}  // namespace bbal

#endif  // BBAL_LOOP_HPP
