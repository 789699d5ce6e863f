#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pccloud/text.hpp"

namespace pccloud::layout {

struct CloudConfig {
    int width = 800;
    int height = 500;
    double minFontSize = 12.0;
    double maxFontSize = 64.0;
    double padding = 2.0;
    double spiralStep = 4.0;  // radial growth per full turn, px
    double angleStep = 0.1;   // radians between spiral candidates
    int maxWords = 100;       // 0 yields an empty cloud
    std::uint64_t seed = 0;   // 0 keeps the spiral's start angle at 0
    std::string fontFamily = "Helvetica, Arial, sans-serif";
    std::vector<std::string> palette = {"#1f4e79", "#c0504d", "#4f8a3c", "#7f5a9e", "#d08a1a", "#2b8c8c"};

    friend bool operator==(const CloudConfig&, const CloudConfig&) = default;
};

/// Throws Error(Parameter) naming the first broken constraint.
void validate(const CloudConfig& cfg);

struct TextExtent {
    double width = 0.0;
    double height = 0.0;
};

struct WordBox {
    std::string term;
    double weight = 0.0;
    double fontSize = 0.0;
    double x = 0.0;  // center
    double y = 0.0;  // center
    double boxWidth = 0.0;
    double boxHeight = 0.0;

    friend bool operator==(const WordBox&, const WordBox&) = default;
};

struct CloudLayout {
    CloudConfig config;
    std::vector<WordBox> placed;               // weight desc, term asc
    std::vector<text::WeightedTerm> skipped;   // did not fit anywhere on the spiral

    friend bool operator==(const CloudLayout&, const CloudLayout&) = default;
};

/// Linear map of [wmin, wmax] onto [minFontSize, maxFontSize]; a degenerate
/// range maps to maxFontSize.
double scaleFont(double weight, double wmin, double wmax, const CloudConfig& cfg);

/// Monospace approximation: 0.6 em per code point wide, 1.2 em tall.
TextExtent measureText(std::string_view term, double fontSize);

/// Greedy Archimedean-spiral placement of the top cfg.maxWords terms.
/// Deterministic in (weights, cfg).
CloudLayout placeWords(const text::TermWeights& weights, const CloudConfig& cfg);

/// Standalone SVG 1.1 document, byte-deterministic for a given layout.
std::string renderSvg(const CloudLayout& layout);

/// Start angle in [0, 2pi) derived from the seed; 0 for seed 0.
double startAngle(std::uint64_t seed);

}  // namespace pccloud::layout
