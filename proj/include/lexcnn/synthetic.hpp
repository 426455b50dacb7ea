#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lexcnn/types.hpp"

namespace lexcnn {

/// Generator for a small 3-class task with a known answer.
///
/// Each document is `length` filler tokens (`w000`, `w001`, ...), uniform in
/// [min_length, max_length]. Documents cycle through positive, neutral,
/// negative. A positive document has one filler replaced by a positive carrier
/// (`good00`, ...), a negative one by a negative carrier (`bad00`, ...); neutral
/// documents carry none. Carriers are split into a training half and a held-out
/// half; the test split draws from the held-out half when
/// `heldout_uses_unseen_carriers` is set.
///
/// Word embeddings cover the fillers only (unless `carriers_in_embeddings`).
/// Fillers sit around one shared centre drawn from
/// U[-filler_centre_range, filler_centre_range]^d, each coordinate offset by
/// U[-filler_spread, filler_spread]. The defaults give the same per-coordinate
/// second moment as the OOV fallback U[-0.25, 0.25]. Two lexicon sources cover every carrier plus a few
/// fillers: `polarity.tsv` with one score in [-1,1], and `counts.tsv` with raw
/// positive/negative occurrence counts that get rescaled on load.
struct SyntheticSpec {
  int train_documents = 120;
  int dev_documents = 60;
  int test_documents = 120;
  int min_length = 5;
  int max_length = 10;
  int filler_vocabulary = 60;
  int carriers_per_polarity = 40;
  int lexicon_fillers = 10;
  double filler_centre_range = 0.2;
  double filler_spread = 0.15;
  bool carriers_in_embeddings = false;
  bool heldout_uses_unseen_carriers = true;
  std::uint64_t seed = 1;
};

struct SyntheticFiles {
  std::filesystem::path train;
  std::filesystem::path dev;
  std::filesystem::path test;
  std::vector<std::filesystem::path> lexicon_sources;
  /// Carrier token per document of the test split (empty for neutral documents).
  std::vector<std::string> test_carriers;
};

/// Writes the corpus splits and lexicon sources into `dir`.
SyntheticFiles write_synthetic_task(const SyntheticSpec& spec, const std::filesystem::path& dir);

/// Writes a textual embedding file of dimension `dim` for the task's vocabulary.
std::filesystem::path write_synthetic_embeddings(const SyntheticSpec& spec, Index dim,
                                                 const std::filesystem::path& path);

}  // namespace lexcnn
