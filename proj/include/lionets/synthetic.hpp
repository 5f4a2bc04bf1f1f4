#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lionets/numerics.hpp"
#include "lionets/timeseries.hpp"

namespace lionets::data {

struct DenseDataset {
    Matrix features;  // values min-max scaled to [0, 1]
    Vec labels;       // +1 / -1
};

/// Two Gaussian classes. The first max(2, features / 2) columns carry the class signal,
/// the remaining columns are noisy linear mixtures of them.
DenseDataset synth_classification(std::size_t n, std::size_t features, std::uint64_t seed);

/// Run-to-failure units with lifetimes in [120, 250]; every sensor follows a smooth
/// monotone degradation trend plus Gaussian noise, scaled to [0, 1] per sensor.
/// Timesteps start at 1 and RUL = lifetime - t.
std::vector<UnitSeries> synth_degradation(std::size_t units, std::size_t sensors,
                                          std::uint64_t seed);

struct LabelledText {
    int label = 0;  // 1 spam, 0 ham
    std::string text;
};

/// Short spam/ham messages drawn from fixed word pools.
std::vector<LabelledText> synth_text_corpus(std::size_t n, std::uint64_t seed);

/// Word pools used by synth_text_corpus, exposed for tests.
const std::vector<std::string>& spam_cue_words();
const std::vector<std::string>& ham_cue_words();
const std::vector<std::string>& filler_words();

}  // namespace lionets::data
