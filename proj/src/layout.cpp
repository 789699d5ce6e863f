#include "pccloud/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>

#include "pccloud/error.hpp"

namespace pccloud::layout {

namespace {

struct Rect {
    double x0, y0, x1, y1;

    bool intersects(const Rect& o) const
    {
        return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
    }
};

Rect paddedRect(double x, double y, double boxWidth, double boxHeight, double padding)
{
    const double hw = boxWidth / 2.0 + padding / 2.0;
    const double hh = boxHeight / 2.0 + padding / 2.0;
    return {x - hw, y - hh, x + hw, y + hh};
}

// Uniform bucket grid over the canvas; each placed rect is registered in
// every cell it touches.
class CollisionGrid {
public:
    CollisionGrid(double width, double height, double cellSize)
        : cell_(cellSize),
          cols_(std::max(1, static_cast<int>(std::ceil(width / cellSize)))),
          rows_(std::max(1, static_cast<int>(std::ceil(height / cellSize)))),
          buckets_(static_cast<std::size_t>(cols_ * rows_))
    {
    }

    bool collides(const Rect& r) const
    {
        bool hit = false;
        visit(r, [&](const std::vector<std::size_t>& bucket) {
            for (auto idx : bucket) {
                if (rects_[idx].intersects(r)) {
                    hit = true;
                    return false;
                }
            }
            return true;
        });
        return hit;
    }

    void insert(const Rect& r)
    {
        const auto idx = rects_.size();
        rects_.push_back(r);
        visitMutable(r, [&](std::vector<std::size_t>& bucket) { bucket.push_back(idx); });
    }

private:
    int clampCol(double x) const { return std::clamp(static_cast<int>(std::floor(x / cell_)), 0, cols_ - 1); }
    int clampRow(double y) const { return std::clamp(static_cast<int>(std::floor(y / cell_)), 0, rows_ - 1); }

    template <typename Fn>
    void visit(const Rect& r, Fn&& fn) const
    {
        for (int row = clampRow(r.y0); row <= clampRow(r.y1); ++row)
            for (int col = clampCol(r.x0); col <= clampCol(r.x1); ++col)
                if (!fn(buckets_[static_cast<std::size_t>(row * cols_ + col)]))
                    return;
    }

    template <typename Fn>
    void visitMutable(const Rect& r, Fn&& fn)
    {
        for (int row = clampRow(r.y0); row <= clampRow(r.y1); ++row)
            for (int col = clampCol(r.x0); col <= clampCol(r.x1); ++col)
                fn(buckets_[static_cast<std::size_t>(row * cols_ + col)]);
    }

    double cell_;
    int cols_;
    int rows_;
    std::vector<Rect> rects_;
    std::vector<std::vector<std::size_t>> buckets_;
};

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

void validate(const CloudConfig& cfg)
{
    auto fail = [](const std::string& what) { throw Error(ErrorKind::Parameter, "invalid cloud config: " + what); };
    if (cfg.width < 16 || cfg.height < 16)
        fail("width and height must be at least 16");
    if (!(cfg.minFontSize > 0.0))
        fail("minFontSize must be positive");
    if (!(cfg.maxFontSize >= cfg.minFontSize))
        fail("maxFontSize must be >= minFontSize");
    if (!(cfg.padding >= 0.0))
        fail("padding must be nonnegative");
    if (!(cfg.spiralStep > 0.0))
        fail("spiralStep must be positive");
    if (!(cfg.angleStep > 0.0))
        fail("angleStep must be positive");
    if (cfg.maxWords < 0)
        fail("maxWords must be nonnegative");
    if (cfg.palette.empty())
        fail("palette needs at least one color");
    static const std::regex hexColor("#([0-9a-fA-F]{3}|[0-9a-fA-F]{6})");
    for (const auto& c : cfg.palette)
        if (!std::regex_match(c, hexColor))
            fail("palette entry '" + c + "' is not a hex color");
    if (cfg.fontFamily.find_first_of("\"<>&") != std::string::npos)
        fail("fontFamily contains markup characters");
}

double scaleFont(double weight, double wmin, double wmax, const CloudConfig& cfg)
{
    if (!(wmin <= weight && weight <= wmax))
        throw Error(ErrorKind::Parameter, "weight outside [wmin, wmax]");
    if (wmax == wmin)
        return cfg.maxFontSize;
    return cfg.minFontSize + (cfg.maxFontSize - cfg.minFontSize) * (weight - wmin) / (wmax - wmin);
}

TextExtent measureText(std::string_view term, double fontSize)
{
    if (term.empty())
        throw Error(ErrorKind::Parameter, "cannot measure an empty term");
    return {0.6 * fontSize * static_cast<double>(text::codePointCount(term)), 1.2 * fontSize};
}

double startAngle(std::uint64_t seed)
{
    if (seed == 0)
        return 0.0;
    const double unit = static_cast<double>(splitmix64(seed) >> 11) * 0x1.0p-53;
    return unit * 2.0 * std::numbers::pi;
}

CloudLayout placeWords(const text::TermWeights& weights, const CloudConfig& cfg)
{
    validate(cfg);

    CloudLayout layout;
    layout.config = cfg;
    const auto terms = text::topTerms(weights, static_cast<std::size_t>(cfg.maxWords));
    if (terms.empty())
        return layout;

    const double wmax = terms.front().second;
    const double wmin = terms.back().second;
    const double width = cfg.width;
    const double height = cfg.height;
    const double cx = width / 2.0;
    const double cy = height / 2.0;
    const double eccentricity = height / width;
    const double diagonal = std::hypot(width, height);
    const double phi0 = startAngle(cfg.seed);

    CollisionGrid grid(width, height, 32.0);

    for (const auto& [term, weight] : terms) {
        const double fontSize = scaleFont(weight, wmin, wmax, cfg);
        const auto extent = measureText(term, fontSize);
        const double halfW = extent.width / 2.0 + cfg.padding / 2.0;
        const double halfH = extent.height / 2.0 + cfg.padding / 2.0;

        // Past this radius every candidate center leaves the canvas, so the
        // walk may stop there without changing the outcome of the
        // diagonal-bounded search.
        const double slackX = cx - halfW;
        const double slackY = (cy - halfH) / eccentricity;
        double radiusLimit = -1.0;
        if (slackX >= 0.0 && slackY >= 0.0)
            radiusLimit = std::min(diagonal, std::hypot(slackX, slackY) * (1.0 + 1e-9) + 1e-9);

        bool placed = false;
        for (std::uint64_t j = 0; radiusLimit >= 0.0; ++j) {
            const double theta = static_cast<double>(j) * cfg.angleStep;
            const double r = cfg.spiralStep * theta / (2.0 * std::numbers::pi);
            if (r > radiusLimit)
                break;
            const double x = cx + r * std::cos(theta + phi0);
            const double y = cy + eccentricity * r * std::sin(theta + phi0);
            const Rect box = paddedRect(x, y, extent.width, extent.height, cfg.padding);
            if (box.x0 < 0.0 || box.y0 < 0.0 || box.x1 > width || box.y1 > height)
                continue;
            if (grid.collides(box))
                continue;
            grid.insert(box);
            layout.placed.push_back({term, weight, fontSize, x, y, extent.width, extent.height});
            placed = true;
            break;
        }
        if (!placed)
            layout.skipped.emplace_back(term, weight);
    }
    return layout;
}

}  // namespace pccloud::layout
