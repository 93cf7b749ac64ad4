#ifndef BT_REPORT_HPP
#define BT_REPORT_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace bt {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

// Minimal static SVG line plot (polylines + axes + legend, no timestamps).
// Log axes require strictly positive data on that axis.
void write_svg_plot(std::ostream& os, const std::vector<PlotSeries>& series,
                    const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, bool logx, bool logy);

inline void write_svg_loglog(std::ostream& os, const std::vector<PlotSeries>& s,
                             const std::string& title, const std::string& xl,
                             const std::string& yl) {
    write_svg_plot(os, s, title, xl, yl, true, true);
}

inline void write_svg_lines(std::ostream& os, const std::vector<PlotSeries>& s,
                            const std::string& title, const std::string& xl,
                            const std::string& yl) {
    write_svg_plot(os, s, title, xl, yl, false, false);
}

}  // namespace bt

#endif
