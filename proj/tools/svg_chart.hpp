// wakebeam - learned instant initial access for mmWave cell-free networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace wakebeam::svg {

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

inline std::string fmt_tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

/// Minimal line chart. Downsamples long series by striding; enough for the
/// regret curve and the scenario traces.
inline std::string line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<Series>& series)
{
    const double w = 840, h = 520;
    const double ml = 80, mr = 30, mt = 50, mb = 60;
    const double pw = w - ml - mr, ph = h - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax == xmin)
        xmax = xmin + 1;
    if (ymax == ymin)
        ymax = ymin + 1;
    ymin = std::min(ymin, 0.0);
    ymax *= 1.05;

    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    const auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::string out;
    char buf[256];
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"520\" "
           "font-family=\"sans-serif\" font-size=\"13\">\n";
    out += "<rect width=\"840\" height=\"520\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.0f\" y=\"28\" text-anchor=\"middle\" font-size=\"17\">%s</text>\n",
                  w / 2, title.c_str());
    out += buf;

    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n",
                      px(xv), mt, px(xv), mt + ph);
        out += buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", ml,
                      py(yv), ml + pw, py(yv));
        out += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n", px(xv),
                      mt + ph + 20, fmt_tick(xv).c_str());
        out += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s</text>\n", ml - 8,
                      py(yv) + 4, fmt_tick(yv).c_str());
        out += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" fill=\"none\" "
                  "stroke=\"#444\"/>\n",
                  ml, mt, pw, ph);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.0f\" y=\"%.0f\" text-anchor=\"middle\">%s</text>\n", ml + pw / 2,
                  h - 14, x_label.c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"20\" y=\"%.0f\" text-anchor=\"middle\" transform=\"rotate(-90 20 %.0f)\">%s"
                  "</text>\n",
                  mt + ph / 2, mt + ph / 2, y_label.c_str());
    out += buf;

    double legend_y = mt + 16;
    for (const auto& s : series) {
        const std::size_t stride = std::max<std::size_t>(1, s.points.size() / 2000);
        std::string path = "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); i += stride) {
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px(s.points[i].first), py(s.points[i].second));
            path += buf;
        }
        path += "\"/>\n";
        out += path;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                      "stroke-width=\"3\"/><text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                      ml + pw - 170.0, legend_y, ml + pw - 140.0, legend_y, s.color.c_str(),
                      ml + pw - 132.0, legend_y + 4, s.label.c_str());
        out += buf;
        legend_y += 18;
    }
    out += "</svg>\n";
    return out;
}

} // namespace wakebeam::svg
