#include <fmt/format.h>

#include "pccloud/layout.hpp"

namespace pccloud::layout {

namespace {

std::string xmlEscape(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string renderSvg(const CloudLayout& layout)
{
    const auto& cfg = layout.config;
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\">\n",
        cfg.width, cfg.height);

    // text-anchor + central baseline put the model's glyph-box center on (x, y).
    const auto family = xmlEscape(cfg.fontFamily);
    for (std::size_t rank = 0; rank < layout.placed.size(); ++rank) {
        const auto& w = layout.placed[rank];
        const auto term = xmlEscape(w.term);
        out += fmt::format(
            "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"{}\" font-size=\"{:.2f}\" fill=\"{}\" "
            "text-anchor=\"middle\" dominant-baseline=\"central\" data-term=\"{}\" data-weight=\"{:.2f}\">{}</text>\n",
            w.x, w.y, family, w.fontSize, cfg.palette[rank % cfg.palette.size()], term, w.weight, term);
    }
    out += "</svg>\n";
    return out;
}

}  // namespace pccloud::layout
