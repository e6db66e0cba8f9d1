#include "alearn/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "alearn/errors.hpp"

namespace alearn {

std::string format_real(double value) {
    if (value == 0.0) value = 0.0; // normalize -0
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 6);
    return std::string(buf.data(), res.ptr);
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 640.0;  // legend lives to the right of this
constexpr double kTop = 60.0;
constexpr double kBottom = 540.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range pad_range(double lo, double hi) {
    if (lo > hi) std::swap(lo, hi);
    double span = hi - lo;
    if (span <= 0.0) {
        // Flat data: open up a symmetric window so the line sits mid-chart.
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        return {lo - pad, hi + pad};
    }
    return {lo - 0.05 * span, hi + 0.05 * span};
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<ChartSeries>& series) {
    if (series.empty()) {
        throw ValidationError("chart with no series");
    }
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.mean.size() || s.x.size() != s.std_dev.size()) {
            throw ShapeError("chart series '" + s.name + "' has mismatched point arrays");
        }
    }

    double x_lo = series[0].x[0], x_hi = series[0].x[0];
    double y_lo = series[0].mean[0], y_hi = series[0].mean[0];
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            y_lo = std::min(y_lo, s.mean[i] - s.std_dev[i]);
            y_hi = std::max(y_hi, s.mean[i] + s.std_dev[i]);
        }
    }
    const Range xr = pad_range(x_lo, x_hi);
    const Range yr = pad_range(y_lo, y_hi);

    const auto map_x = [&](double v) {
        return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * (kRight - kLeft);
    };
    const auto map_y = [&](double v) {
        return kBottom - (v - yr.lo) / (yr.hi - yr.lo) * (kBottom - kTop);
    };

    std::string out;
    out.reserve(1 << 14);
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
           "width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"400\" y=\"32\" font-family=\"sans-serif\" font-size=\"18\" "
           "text-anchor=\"middle\">" + xml_escape(title) + "</text>\n";

    // Axes.
    out += "<line x1=\"" + format_real(kLeft) + "\" y1=\"" + format_real(kTop) +
           "\" x2=\"" + format_real(kLeft) + "\" y2=\"" + format_real(kBottom) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out += "<line x1=\"" + format_real(kLeft) + "\" y1=\"" + format_real(kBottom) +
           "\" x2=\"" + format_real(kRight) + "\" y2=\"" + format_real(kBottom) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // Ticks: 5 per axis, values at even fractions of the padded range.
    for (int t = 0; t <= 4; ++t) {
        const double fx = xr.lo + (xr.hi - xr.lo) * t / 4.0;
        const double px = map_x(fx);
        out += "<line x1=\"" + format_real(px) + "\" y1=\"" + format_real(kBottom) +
               "\" x2=\"" + format_real(px) + "\" y2=\"" + format_real(kBottom + 6.0) +
               "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + format_real(px) + "\" y=\"" + format_real(kBottom + 22.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
               format_real(fx) + "</text>\n";

        const double fy = yr.lo + (yr.hi - yr.lo) * t / 4.0;
        const double py = map_y(fy);
        out += "<line x1=\"" + format_real(kLeft - 6.0) + "\" y1=\"" + format_real(py) +
               "\" x2=\"" + format_real(kLeft) + "\" y2=\"" + format_real(py) +
               "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + format_real(kLeft - 10.0) + "\" y=\"" + format_real(py + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" +
               format_real(fy) + "</text>\n";
    }

    out += "<text x=\"" + format_real((kLeft + kRight) / 2.0) + "\" y=\"580\" "
           "font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" +
           xml_escape(x_label) + "</text>\n";
    out += "<text x=\"24\" y=\"" + format_real((kTop + kBottom) / 2.0) +
           "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 24 " + format_real((kTop + kBottom) / 2.0) + ")\">" +
           xml_escape(y_label) + "</text>\n";

    // Bands first so every line draws on top of every band.
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& sr = series[s];
        const char* color = kPalette[s % kPaletteSize];
        std::string pts;
        for (std::size_t i = 0; i < sr.x.size(); ++i) {
            pts += format_real(map_x(sr.x[i])) + "," +
                   format_real(map_y(sr.mean[i] + sr.std_dev[i])) + " ";
        }
        for (std::size_t i = sr.x.size(); i-- > 0;) {
            pts += format_real(map_x(sr.x[i])) + "," +
                   format_real(map_y(sr.mean[i] - sr.std_dev[i]));
            if (i > 0) pts += " ";
        }
        out += "<polygon points=\"" + pts + "\" fill=\"" + color +
               "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& sr = series[s];
        const char* color = kPalette[s % kPaletteSize];
        std::string pts;
        for (std::size_t i = 0; i < sr.x.size(); ++i) {
            if (i > 0) pts += " ";
            pts += format_real(map_x(sr.x[i])) + "," + format_real(map_y(sr.mean[i]));
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        for (std::size_t i = 0; i < sr.x.size(); ++i) {
            out += "<circle cx=\"" + format_real(map_x(sr.x[i])) + "\" cy=\"" +
                   format_real(map_y(sr.mean[i])) + "\" r=\"2.5\" fill=\"" + color +
                   "\"/>\n";
        }
    }

    // Legend, in the order the series were supplied.
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        const double ly = kTop + 10.0 + 22.0 * static_cast<double>(s);
        out += "<line x1=\"656\" y1=\"" + format_real(ly) + "\" x2=\"684\" y2=\"" +
               format_real(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"690\" y=\"" + format_real(ly + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"13\">" +
               xml_escape(series[s].name) + "</text>\n";
    }

    out += "</svg>\n";
    return out;
}

} // namespace alearn
