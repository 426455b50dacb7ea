#include "lexcnn/synthetic.hpp"

#include <fstream>
#include <random>

#include <fmt/format.h>

#include "lexcnn/error.hpp"
#include "lexcnn/util.hpp"

namespace lexcnn {

namespace {

std::string filler(int i) { return fmt::format("w{:03}", i); }
std::string positive_carrier(int i) { return fmt::format("good{:02}", i); }
std::string negative_carrier(int i) { return fmt::format("bad{:02}", i); }

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

constexpr const char* kLabels[3] = {"positive", "neutral", "negative"};

// Writes one split; returns the carrier per document.
std::vector<std::string> write_split(const SyntheticSpec& spec, const std::filesystem::path& path,
                                     const std::string& prefix, int count, bool unseen,
                                     std::mt19937_64& gen) {
  const int half = spec.carriers_per_polarity / 2;
  const int lo = unseen ? half : 0;
  const int span = unseen ? spec.carriers_per_polarity - half : half;
  auto out = open(path);
  std::vector<std::string> carriers;
  for (int i = 0; i < count; ++i) {
    const int label = i % 3;
    const int length = spec.min_length + static_cast<int>(uniform_index(
                                             gen, static_cast<std::uint64_t>(spec.max_length - spec.min_length + 1)));
    std::vector<std::string> tokens;
    for (int k = 0; k < length; ++k) {
      tokens.push_back(filler(static_cast<int>(uniform_index(gen, static_cast<std::uint64_t>(spec.filler_vocabulary)))));
    }
    std::string carrier;
    if (label != 1) {
      const int which = lo + static_cast<int>(uniform_index(gen, static_cast<std::uint64_t>(span)));
      carrier = label == 0 ? positive_carrier(which) : negative_carrier(which);
      tokens[uniform_index(gen, static_cast<std::uint64_t>(length))] = carrier;
    }
    carriers.push_back(carrier);
    out << prefix << i << '\t' << kLabels[label] << '\t';
    for (std::size_t k = 0; k < tokens.size(); ++k) out << (k > 0 ? " " : "") << tokens[k];
    out << '\n';
  }
  return carriers;
}

}  // namespace

SyntheticFiles write_synthetic_task(const SyntheticSpec& spec, const std::filesystem::path& dir) {
  if (spec.min_length < 1 || spec.max_length < spec.min_length || spec.filler_vocabulary < 1 ||
      spec.carriers_per_polarity < 2) {
    throw UsageError("invalid synthetic task parameters");
  }
  std::filesystem::create_directories(dir);
  std::mt19937_64 gen(spec.seed);
  SyntheticFiles files;
  files.train = dir / "train.tsv";
  files.dev = dir / "dev.tsv";
  files.test = dir / "test.tsv";
  write_split(spec, files.train, "trn", spec.train_documents, false, gen);
  write_split(spec, files.dev, "dev", spec.dev_documents, false, gen);
  files.test_carriers =
      write_split(spec, files.test, "tst", spec.test_documents, spec.heldout_uses_unseen_carriers, gen);

  const auto polarity_path = dir / "polarity.tsv";
  const auto counts_path = dir / "counts.tsv";
  auto polarity = open(polarity_path);
  auto counts = open(counts_path);
  polarity << "# word<TAB>polarity in [-1,1]\n";
  counts << "# word<TAB>positive count<TAB>negative count\n";
  for (int i = 0; i < spec.carriers_per_polarity; ++i) {
    polarity << positive_carrier(i) << '\t' << format_shortest(uniform(gen, 0.5, 1.0)) << '\n';
    polarity << negative_carrier(i) << '\t' << format_shortest(uniform(gen, -1.0, -0.5)) << '\n';
    const auto strong = [&] { return 20 + uniform_index(gen, 81); };
    const auto weak = [&] { return uniform_index(gen, 11); };
    counts << positive_carrier(i) << '\t' << strong() << '\t' << weak() << '\n';
    counts << negative_carrier(i) << '\t' << weak() << '\t' << strong() << '\n';
  }
  for (int i = 0; i < std::min(spec.lexicon_fillers, spec.filler_vocabulary); ++i) {
    polarity << filler(i) << '\t' << format_shortest(uniform(gen, -0.2, 0.2)) << '\n';
    const auto c = 10 + uniform_index(gen, 11);
    counts << filler(i) << '\t' << c << '\t' << c << '\n';
  }
  files.lexicon_sources = {polarity_path, counts_path};
  return files;
}

std::filesystem::path write_synthetic_embeddings(const SyntheticSpec& spec, Index dim,
                                                 const std::filesystem::path& path) {
  if (dim <= 0) throw UsageError("embedding dimension must be positive");
  std::vector<std::string> words;
  for (int i = 0; i < spec.filler_vocabulary; ++i) words.push_back(filler(i));
  if (spec.carriers_in_embeddings) {
    for (int i = 0; i < spec.carriers_per_polarity; ++i) {
      words.push_back(positive_carrier(i));
      words.push_back(negative_carrier(i));
    }
  }
  std::mt19937_64 centre_gen(splitmix64(spec.seed ^ static_cast<std::uint64_t>(dim)));
  std::vector<double> centre(static_cast<std::size_t>(dim));
  for (auto& c : centre) c = uniform(centre_gen, -spec.filler_centre_range, spec.filler_centre_range);
  auto out = open(path);
  out << words.size() << ' ' << dim << '\n';
  for (const auto& w : words) {
    std::mt19937_64 gen(splitmix64(spec.seed ^ fnv1a64(w) ^ static_cast<std::uint64_t>(dim)));
    out << w;
    for (Index k = 0; k < dim; ++k) {
      const double x = centre[static_cast<std::size_t>(k)] + uniform(gen, -spec.filler_spread, spec.filler_spread);
      out << ' ' << format_shortest(x);
    }
    out << '\n';
  }
  return path;
}

}  // namespace lexcnn
