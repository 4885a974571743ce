#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "qcnn/errors.hpp"
#include "qcnn/runner.hpp"

namespace qcnn {

namespace {

struct Panel {
    double x0, y0, w, h; // plot area in svg coordinates
};

struct Series {
    const char* label;
    const char* color;
    std::vector<double> values;
};

void draw_panel(std::ostringstream& os, const Panel& p, const std::string& title,
                const std::vector<Series>& series, int epochs) {
    double lo = 1e300, hi = -1e300;
    for (const Series& s : series) {
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(hi > lo)) {
        hi = lo + 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const auto x_of = [&](int epoch) {
        return epochs > 1 ? p.x0 + p.w * (epoch - 1) / (epochs - 1) : p.x0 + p.w / 2;
    };
    const auto y_of = [&](double v) { return p.y0 + p.h - p.h * (v - lo) / (hi - lo); };

    os << "<rect x='" << p.x0 << "' y='" << p.y0 << "' width='" << p.w << "' height='" << p.h
       << "' fill='none' stroke='#888'/>\n";
    os << "<text x='" << p.x0 + p.w / 2 << "' y='" << p.y0 - 8
       << "' text-anchor='middle' font-size='13'>" << title << "</text>\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", hi);
    os << "<text x='" << p.x0 - 6 << "' y='" << p.y0 + 10
       << "' text-anchor='end' font-size='10'>" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.4g", lo);
    os << "<text x='" << p.x0 - 6 << "' y='" << p.y0 + p.h
       << "' text-anchor='end' font-size='10'>" << buf << "</text>\n";
    os << "<text x='" << p.x0 << "' y='" << p.y0 + p.h + 14
       << "' text-anchor='middle' font-size='10'>1</text>\n";
    os << "<text x='" << p.x0 + p.w << "' y='" << p.y0 + p.h + 14
       << "' text-anchor='middle' font-size='10'>" << epochs << "</text>\n";

    int legend_i = 0;
    for (const Series& s : series) {
        os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
        for (int e = 1; e <= epochs; ++e) {
            os << x_of(e) << ',' << y_of(s.values[static_cast<std::size_t>(e - 1)]) << ' ';
        }
        os << "'/>\n";
        const double lx = p.x0 + 8 + 110 * legend_i;
        const double ly = p.y0 + p.h + 30;
        os << "<line x1='" << lx << "' y1='" << ly - 4 << "' x2='" << lx + 18 << "' y2='" << ly - 4
           << "' stroke='" << s.color << "' stroke-width='2'/>\n";
        os << "<text x='" << lx + 22 << "' y='" << ly << "' font-size='11'>" << s.label
           << "</text>\n";
        ++legend_i;
    }
}

} // namespace

std::string metrics_svg(const std::vector<RunMetrics>& rows, const std::string& title) {
    if (rows.empty()) throw data_error("metrics_svg: no rows");
    const int epochs = static_cast<int>(rows.size());

    Series train_loss{"train loss", "#c0392b", {}};
    Series test_loss{"test loss", "#e67e22", {}};
    Series train_acc{"train accuracy", "#2980b9", {}};
    Series test_acc{"test accuracy", "#27ae60", {}};
    for (const RunMetrics& r : rows) {
        train_loss.values.push_back(r.train_loss);
        test_loss.values.push_back(r.test_loss);
        train_acc.values.push_back(r.train_accuracy);
        test_acc.values.push_back(r.test_accuracy);
    }

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='900' height='400' "
          "viewBox='0 0 900 400'>\n";
    os << "<text x='450' y='20' text-anchor='middle' font-size='15'>" << title << "</text>\n";
    draw_panel(os, Panel{60, 50, 330, 260}, "loss", {train_loss, test_loss}, epochs);
    draw_panel(os, Panel{510, 50, 330, 260}, "accuracy", {train_acc, test_acc}, epochs);
    os << "</svg>\n";
    return os.str();
}

} // namespace qcnn
