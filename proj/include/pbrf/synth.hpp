#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pbrf {

// Offline stand-ins for the UCI benchmarks used in the experiments. Each
// profile reproduces the benchmark's shape (rows, feature count, label
// alphabet, class balance) and is calibrated so bagged trees land in the
// same strength/disagreement regime. The feature distributions are fixed;
// the seed only drives the sample draw.
enum class SynthProfile {
  Mushroom,   // 8124 x 22 categorical, exactly learnable rule
  LetterAB,   // 1555 x 16 integer, well separated pair
  LetterDO,   // 1558 x 16 integer, harder pair
  LetterOQ,   // 1536 x 16 integer, hardest pair
  CreditA,    // 653 x 15 mixed, noisy labels
  TicTacToe,  // 958 x 9 categorical, conjunctive rule
};

struct SynthProfileInfo {
  std::string name;
  std::size_t default_rows;
  std::size_t n_features;
  std::string label_column;
  std::string positive_label;
};

SynthProfileInfo synth_profile_info(SynthProfile profile);
SynthProfile parse_synth_profile(const std::string& name);
std::vector<std::string> synth_profile_names();

// CSV text (header plus rows); n_rows = 0 keeps the profile's native size.
std::string synth_csv(SynthProfile profile, std::uint64_t seed,
                      std::size_t n_rows = 0);

void synth_to_file(SynthProfile profile, std::uint64_t seed,
                   const std::string& path, std::size_t n_rows = 0);

}  // namespace pbrf
