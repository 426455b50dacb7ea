#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lexcnn/config.hpp"
#include "lexcnn/model.hpp"

namespace lexcnn {

/// Where the tables a model was trained with came from.
struct TableProvenance {
  std::string embeddings_path;
  std::string embeddings_digest;
  std::vector<std::string> lexicon_paths;
  std::vector<std::string> lexicon_digests;
};

template <typename Scalar>
struct Checkpoint {
  TrainConfig config;
  TableProvenance tables;
  ModelParameters<Scalar> params;
};

/// JSON container: format tag, effective config, table provenance, a hash of the
/// tuned vocabulary, and every tensor with its shape. Values are written as
/// hexadecimal floats, so loading reproduces each tensor bit for bit.
template <typename Scalar>
void save_checkpoint(const Checkpoint<Scalar>& ckpt, const std::filesystem::path& path);

/// Reads only the config (to pick the precision before a typed load).
TrainConfig read_checkpoint_config(const std::filesystem::path& path);

template <typename Scalar>
Checkpoint<Scalar> load_checkpoint(const std::filesystem::path& path);

/// FNV-1a over the tuned vocabulary in row order.
std::string vocabulary_hash(const std::vector<std::string>& words);

}  // namespace lexcnn
