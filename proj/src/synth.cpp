#include "pbrf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>

#include "pbrf/errors.hpp"
#include "pbrf/rng.hpp"

namespace pbrf {

namespace {

std::size_t pick(Rng& rng, std::span<const double> probs) {
  double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    if (u < probs[i]) return i;
    u -= probs[i];
  }
  return probs.size() - 1;
}

void append_int(std::string& out, long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%ld", v);
  out += buf;
}

void append_num(std::string& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  out += buf;
}

std::string header(std::size_t d, const std::string& label_column) {
  std::string h;
  for (std::size_t f = 0; f < d; ++f) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "f%02zu", f);
    h += buf;
    h += ',';
  }
  h += label_column;
  h += '\n';
  return h;
}

// ---- mushroom ----
//
// 22 categorical features; the label is a deterministic rule over odor
// (f04), gill size (f06) and spore color (f19), mirroring the structure that
// makes the original dataset exactly learnable. The remaining features carry
// weak class signal so bootstrapped trees differ slightly.
std::string gen_mushroom(Rng& rng, std::size_t n) {
  constexpr std::size_t kFeatures = 22;
  const char odor_levels[] = {'a', 'l', 'n', 'p', 'f', 'c', 'y', 's', 'm'};
  const double odor_e[] = {0.22, 0.20, 0.58, 0, 0, 0, 0, 0, 0};
  const double odor_p[] = {0, 0, 0.06, 0.12, 0.42, 0.05, 0.15, 0.16, 0.04};
  const char spore_levels[] = {'k', 'n', 'b', 'h', 'r', 'w', 'y'};
  const double spore_e[] = {0.28, 0.30, 0.08, 0.10, 0.0, 0.20, 0.04};
  const double spore_p[] = {0.12, 0.12, 0.0, 0.30, 0.10, 0.30, 0.06};
  const char gill_levels[] = {'b', 'n'};
  const double gill_e[] = {0.70, 0.30};
  const double gill_p[] = {0.35, 0.65};

  // Background features: fixed level counts and per-intent distributions
  // derived from a constant-seed generator, independent of the sample seed.
  struct Background {
    std::size_t levels;
    std::vector<double> p_e, p_p;
  };
  std::vector<Background> bg(kFeatures);
  Rng table_rng(0xC0FFEEULL);
  for (std::size_t f = 0; f < kFeatures; ++f) {
    Background& b = bg[f];
    b.levels = 2 + table_rng.below(5);
    double tot_e = 0, tot_p = 0;
    for (std::size_t l = 0; l < b.levels; ++l) {
      const double we = 0.2 + table_rng.uniform();
      const double shift = 0.25 * (table_rng.uniform() - 0.5);
      b.p_e.push_back(we);
      b.p_p.push_back(std::max(0.05, we + shift));
      tot_e += b.p_e.back();
      tot_p += b.p_p.back();
    }
    for (auto& v : b.p_e) v /= tot_e;
    for (auto& v : b.p_p) v /= tot_p;
  }

  std::string out = header(kFeatures, "class");
  for (std::size_t r = 0; r < n; ++r) {
    const bool intent_e = rng.uniform() < 0.53;
    const char odor = odor_levels[pick(rng, intent_e ? odor_e : odor_p)];
    const char gill = gill_levels[pick(rng, intent_e ? gill_e : gill_p)];
    const char spore = spore_levels[pick(rng, intent_e ? spore_e : spore_p)];
    const bool edible =
        odor == 'a' || odor == 'l' ||
        (odor == 'n' && spore != 'r' && !(spore == 'w' && gill == 'n'));

    for (std::size_t f = 0; f < kFeatures; ++f) {
      char cell;
      if (f == 4) {
        cell = odor;
      } else if (f == 6) {
        cell = gill;
      } else if (f == 19) {
        cell = spore;
      } else {
        cell = static_cast<char>(
            'a' + pick(rng, intent_e ? bg[f].p_e : bg[f].p_p));
      }
      out += cell;
      out += ',';
    }
    out += edible ? 'e' : 'p';
    out += '\n';
  }
  return out;
}

// ---- letter pairs ----
//
// 16 integer features in 0..15 from two class-conditional Gaussians with a
// fixed informative-coordinate pattern; the mean gap controls pair
// difficulty (AB well separated, DO/OQ overlapping).
std::string gen_letter_pair(Rng& rng, std::size_t n_first, std::size_t n_second,
                            char first, char second, double gap_scale,
                            std::size_t n_override) {
  constexpr std::size_t kFeatures = 16;
  double base[kFeatures], weight[kFeatures];
  for (std::size_t f = 0; f < kFeatures; ++f) {
    base[f] = 7.5 + 2.0 * std::sin(1.3 * static_cast<double>(f));
    weight[f] = std::max(0.0, std::sin(2.1 * static_cast<double>(f) + 0.7));
  }
  constexpr double kSigma = 2.0;

  std::size_t total = n_first + n_second;
  if (n_override > 0) {
    n_first = n_override * n_first / total;
    n_second = n_override - n_first;
    total = n_override;
  }

  // Deterministic interleaving of the two classes.
  std::vector<char> labels;
  labels.insert(labels.end(), n_first, first);
  labels.insert(labels.end(), n_second, second);
  for (std::size_t i = total; i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);

  std::string out = header(kFeatures, "letter");
  for (std::size_t r = 0; r < total; ++r) {
    const double side = labels[r] == first ? 0.5 : -0.5;
    for (std::size_t f = 0; f < kFeatures; ++f) {
      const double mean = base[f] + side * gap_scale * weight[f];
      const double v = std::clamp(std::round(mean + kSigma * rng.normal()), 0.0, 15.0);
      append_int(out, static_cast<long>(v));
      out += ',';
    }
    out += labels[r];
    out += '\n';
  }
  return out;
}

// ---- credit ----
//
// 15 mixed features (9 categorical, 6 numeric) tied to a latent class with
// moderate gaps plus 8% label noise, giving tree losses around 0.2.
std::string gen_credit(Rng& rng, std::size_t n) {
  constexpr std::size_t kFeatures = 15;
  const bool is_numeric[kFeatures] = {false, true,  true,  false, false,
                                      true,  false, false, true,  false,
                                      false, true,  false, false, true};
  std::size_t levels[kFeatures];
  double gap[kFeatures];
  Rng table_rng(0xBEEFULL);
  for (std::size_t f = 0; f < kFeatures; ++f) {
    levels[f] = 2 + table_rng.below(8);
    gap[f] = 0.15 + 0.55 * table_rng.uniform();
  }

  std::string out = header(kFeatures, "approved");
  for (std::size_t r = 0; r < n; ++r) {
    const double y0 = rng.uniform() < 0.45 ? 1.0 : -1.0;
    for (std::size_t f = 0; f < kFeatures; ++f) {
      const double v = y0 * gap[f] + rng.normal();
      if (is_numeric[f]) {
        append_num(out, std::exp(0.6 * v + 1.5));
      } else {
        const double u = 0.5 * (1.0 + std::erf(v / std::sqrt(2.0)));
        const auto level = std::min<std::size_t>(
            levels[f] - 1, static_cast<std::size_t>(u * static_cast<double>(levels[f])));
        out += static_cast<char>('a' + level);
      }
      out += ',';
    }
    const bool flip = rng.uniform() < 0.08;
    out += (y0 > 0.0) != flip ? '+' : '-';
    out += '\n';
  }
  return out;
}

// ---- tic-tac-toe ----
//
// Nine cells in {x, o, b}; positive iff some line is all x.
std::string gen_tictactoe(Rng& rng, std::size_t n) {
  static const int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                   {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
  const double cell_probs[] = {0.50, 0.32, 0.18};
  const char cell_levels[] = {'x', 'o', 'b'};

  std::string out = header(9, "outcome");
  for (std::size_t r = 0; r < n; ++r) {
    char board[9];
    for (auto& c : board) c = cell_levels[pick(rng, cell_probs)];
    bool win = false;
    for (const auto& line : kLines)
      win = win || (board[line[0]] == 'x' && board[line[1]] == 'x' &&
                    board[line[2]] == 'x');
    for (char c : board) {
      out += c;
      out += ',';
    }
    out += win ? "positive" : "negative";
    out += '\n';
  }
  return out;
}

}  // namespace

SynthProfileInfo synth_profile_info(SynthProfile profile) {
  switch (profile) {
    case SynthProfile::Mushroom:
      return {"mushroom", 8124, 22, "class", "e"};
    case SynthProfile::LetterAB:
      return {"letter_ab", 1555, 16, "letter", "A"};
    case SynthProfile::LetterDO:
      return {"letter_do", 1558, 16, "letter", "D"};
    case SynthProfile::LetterOQ:
      return {"letter_oq", 1536, 16, "letter", "O"};
    case SynthProfile::CreditA:
      return {"credit_a", 653, 15, "approved", "+"};
    case SynthProfile::TicTacToe:
      return {"tictactoe", 958, 9, "outcome", "positive"};
  }
  throw ConfigError("unknown synth profile");
}

SynthProfile parse_synth_profile(const std::string& name) {
  for (SynthProfile p :
       {SynthProfile::Mushroom, SynthProfile::LetterAB, SynthProfile::LetterDO,
        SynthProfile::LetterOQ, SynthProfile::CreditA, SynthProfile::TicTacToe})
    if (synth_profile_info(p).name == name) return p;
  throw ConfigError("unknown synth profile: " + name);
}

std::vector<std::string> synth_profile_names() {
  std::vector<std::string> names;
  for (SynthProfile p :
       {SynthProfile::Mushroom, SynthProfile::LetterAB, SynthProfile::LetterDO,
        SynthProfile::LetterOQ, SynthProfile::CreditA, SynthProfile::TicTacToe})
    names.push_back(synth_profile_info(p).name);
  return names;
}

std::string synth_csv(SynthProfile profile, std::uint64_t seed, std::size_t n_rows) {
  Rng rng(mix_seed(seed, 0x5EEDULL));
  const std::size_t n = n_rows > 0 ? n_rows : synth_profile_info(profile).default_rows;
  switch (profile) {
    case SynthProfile::Mushroom:
      return gen_mushroom(rng, n);
    case SynthProfile::LetterAB:
      return gen_letter_pair(rng, 789, 766, 'A', 'B', 3.4, n_rows);
    case SynthProfile::LetterDO:
      return gen_letter_pair(rng, 805, 753, 'D', 'O', 2.1, n_rows);
    case SynthProfile::LetterOQ:
      return gen_letter_pair(rng, 753, 783, 'O', 'Q', 1.9, n_rows);
    case SynthProfile::CreditA:
      return gen_credit(rng, n);
    case SynthProfile::TicTacToe:
      return gen_tictactoe(rng, n);
  }
  throw ConfigError("unknown synth profile");
}

void synth_to_file(SynthProfile profile, std::uint64_t seed,
                   const std::string& path, std::size_t n_rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset file: " + path);
  out << synth_csv(profile, seed, n_rows);
}

}  // namespace pbrf
