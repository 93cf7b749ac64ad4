#include "bt/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace bt {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* kColors[] = {"#1f6fb4", "#d64b24", "#3a9447", "#8055a8",
                         "#b58c1f", "#4f4f4f"};

struct AxisMap {
    double lo, hi;
    bool log;
    double pos_lo, pos_hi;  // pixel range

    double operator()(double v) const {
        const double a = log ? std::log10(v) : v;
        const double l = log ? std::log10(lo) : lo;
        const double h = log ? std::log10(hi) : hi;
        const double t = h == l ? 0.5 : (a - l) / (h - l);
        return pos_lo + t * (pos_hi - pos_lo);
    }
};

}  // namespace

void write_svg_plot(std::ostream& os, const std::vector<PlotSeries>& series,
                    const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, bool logx, bool logy) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("write_svg_plot: ragged series");
        for (size_t i = 0; i < s.x.size(); ++i) {
            if ((logx && s.x[i] <= 0.0) || (logy && s.y[i] <= 0.0))
                throw std::invalid_argument(
                    "write_svg_plot: non-positive value on a log axis");
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (xmin > xmax) {
        xmin = ymin = logx || logy ? 0.1 : 0.0;
        xmax = ymax = 1.0;
    }
    if (xmin == xmax) { xmin *= logx ? 0.5 : 1.0; xmax = logx ? xmax * 2.0 : xmax + 1.0; if (!logx) xmin -= 1.0; }
    if (ymin == ymax) { ymin *= logy ? 0.5 : 1.0; ymax = logy ? ymax * 2.0 : ymax + 1.0; if (!logy) ymin -= 1.0; }

    const AxisMap X{xmin, xmax, logx, kLeft, kWidth - kRight};
    const AxisMap Y{ymin, ymax, logy, kHeight - kBottom, kTop};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
       << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-size=\"16\">" << title << "</text>\n";

    // axes
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
       << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
       << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\""
       << kHeight - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << (kTop + kHeight - kBottom) / 2 << ")\">" << ylabel << "</text>\n";

    // min/max tick labels
    os.precision(4);
    os << "<text x=\"" << kLeft << "\" y=\"" << kHeight - kBottom + 16
       << "\" font-size=\"10\">" << xmin << "</text>\n";
    os << "<text x=\"" << kWidth - kRight << "\" y=\"" << kHeight - kBottom + 16
       << "\" text-anchor=\"end\" font-size=\"10\">" << xmax << "</text>\n";
    os << "<text x=\"" << kLeft - 4 << "\" y=\"" << kHeight - kBottom
       << "\" text-anchor=\"end\" font-size=\"10\">" << ymin << "</text>\n";
    os << "<text x=\"" << kLeft - 4 << "\" y=\"" << kTop + 4
       << "\" text-anchor=\"end\" font-size=\"10\">" << ymax << "</text>\n";

    // decade gridlines on log axes
    if (logx)
        for (int d = static_cast<int>(std::ceil(std::log10(xmin)));
             d <= static_cast<int>(std::floor(std::log10(xmax))); ++d) {
            const double px = X(std::pow(10.0, d));
            os << "<line x1=\"" << px << "\" y1=\"" << kTop << "\" x2=\"" << px
               << "\" y2=\"" << kHeight - kBottom
               << "\" stroke=\"#dddddd\"/>\n";
        }
    if (logy)
        for (int d = static_cast<int>(std::ceil(std::log10(ymin)));
             d <= static_cast<int>(std::floor(std::log10(ymax))); ++d) {
            const double py = Y(std::pow(10.0, d));
            os << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\""
               << kWidth - kRight << "\" y2=\"" << py
               << "\" stroke=\"#dddddd\"/>\n";
        }

    os.precision(8);
    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kColors[si % 6];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i)
            os << X(s.x[i]) << ',' << Y(s.y[i]) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << kWidth - kRight - 6 << "\" y=\""
           << kTop + 16 + 14 * static_cast<double>(si)
           << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">"
           << s.label << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace bt
