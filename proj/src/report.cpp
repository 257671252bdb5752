#include "chromnet/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace chromnet::metrics {

namespace {

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Plot frame shared by both figures.
constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

struct Frame {
    double y_max;
    double x(double frac) const { return kLeft + frac * (kWidth - kLeft - kRight); }
    double y(double v) const { return kHeight - kBottom - v / y_max * (kHeight - kTop - kBottom); }
};

double nice_ceiling(double v) {
    if (v <= 0) return 1;
    const double p = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (m * p >= v) return m * p;
    return 10 * p;
}

void open_svg(std::ostringstream& os, const std::string& title, const std::string& y_label, const Frame& f) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title)
       << "</text>\n";
    os << "<text transform=\"translate(14," << kHeight / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape_xml(y_label) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = f.y_max * k / 4;
        os << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << fixed(f.y(v), 1) << "\" y2=\""
           << fixed(f.y(v), 1) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(f.y(v) + 4, 1) << "\" text-anchor=\"end\">" << num(v)
           << "</text>\n";
    }
}

} // namespace

std::vector<ReportRow> report_rows(const EvalReport& r, const std::string& target, const std::string& model) {
    return {
        {"mae", target, model, r.mae},
        {"p_0.5", target, model, r.p_half},
        {"p_1", target, model, r.p_one},
        {"mape", target, model, r.mape},
        {"n", target, model, static_cast<double>(r.n)},
    };
}

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::string out = "metric,target,model,value\n";
    for (const auto& r : rows) {
        for (const auto* field : {&r.metric, &r.target, &r.model}) {
            if (field->find_first_of(",\n\"") != std::string::npos) {
                throw std::invalid_argument("report field '" + *field + "' needs quoting");
            }
        }
        out += r.metric + ',' + r.target + ',' + r.model + ',' + num(r.value) + '\n';
    }
    return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "metric,target,model,value") throw std::invalid_argument("bad report header");
    std::vector<ReportRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1)
            f.push_back(line.substr(start, pos - start));
        f.push_back(line.substr(start));
        if (f.size() != 4) throw std::invalid_argument("report row needs 4 fields: " + line);
        ReportRow r{f[0], f[1], f[2], 0};
        const auto res = std::from_chars(f[3].data(), f[3].data() + f[3].size(), r.value);
        if (res.ec != std::errc{} || res.ptr != f[3].data() + f[3].size()) {
            throw std::invalid_argument("bad report value: " + f[3]);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string grouped_csv(const std::vector<GroupStats>& groups) {
    std::string out = "bin_lo,bin_hi,n,q1,median,q3,whisker_lo,whisker_hi\n";
    for (const auto& g : groups) {
        out += num(g.bin_lo) + ',' + num(g.bin_hi) + ',' + std::to_string(g.n);
        if (g.n == 0) {
            out += ",,,,,\n";
            continue;
        }
        for (double v : {g.q1, g.median, g.q3, g.whisker_lo, g.whisker_hi}) out += ',' + num(v);
        out += '\n';
    }
    return out;
}

std::string svg_histogram(const std::map<int, std::size_t>& histogram, const std::string& title,
                          const std::string& x_label) {
    std::size_t peak = 0;
    int lo = 0, hi = 0;
    if (!histogram.empty()) {
        lo = histogram.begin()->first;
        hi = histogram.rbegin()->first;
        for (const auto& [k, v] : histogram) peak = std::max(peak, v);
    }
    const Frame f{nice_ceiling(static_cast<double>(peak))};
    std::ostringstream os;
    open_svg(os, title, "records", f);
    const int slots = hi - lo + 1;
    const double bar = 1.0 / slots;
    for (const auto& [k, v] : histogram) {
        const double x0 = f.x((k - lo) * bar);
        const double x1 = f.x((k - lo + 1) * bar);
        os << "<rect x=\"" << fixed(x0 + 1, 1) << "\" y=\"" << fixed(f.y(static_cast<double>(v)), 1) << "\" width=\""
           << fixed(std::max(x1 - x0 - 2, 1.0), 1) << "\" height=\""
           << fixed(f.y(0) - f.y(static_cast<double>(v)), 1) << "\" fill=\"#4878a8\"><title>" << k << ": " << v
           << "</title></rect>\n";
        if (slots <= 30 || (k - lo) % 5 == 0) {
            os << "<text x=\"" << fixed((x0 + x1) / 2, 1) << "\" y=\"" << kHeight - kBottom + 14
               << "\" text-anchor=\"middle\">" << k << "</text>\n";
        }
    }
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
       << escape_xml(x_label) << "</text>\n</svg>\n";
    return os.str();
}

std::string svg_boxplot(const std::vector<GroupStats>& groups, const std::string& title, const std::string& y_label) {
    double top = 0;
    for (const auto& g : groups)
        if (g.n) top = std::max(top, g.whisker_hi);
    const Frame f{nice_ceiling(top)};
    std::ostringstream os;
    open_svg(os, title, y_label, f);
    const double slot = groups.empty() ? 1.0 : 1.0 / static_cast<double>(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        const double x0 = f.x(static_cast<double>(i) * slot);
        const double x1 = f.x(static_cast<double>(i + 1) * slot);
        const double mid = (x0 + x1) / 2;
        const double half = std::max((x1 - x0) * 0.3, 1.0);
        os << "<text x=\"" << fixed(mid, 1) << "\" y=\"" << kHeight - kBottom + 14 << "\" text-anchor=\"middle\">("
           << num(g.bin_lo) << "," << num(g.bin_hi) << "]</text>\n";
        if (g.n == 0) continue;
        os << "<g stroke=\"#333\" fill=\"none\"><title>n=" << g.n << "</title>\n";
        os << "<line x1=\"" << fixed(mid, 1) << "\" x2=\"" << fixed(mid, 1) << "\" y1=\"" << fixed(f.y(g.whisker_lo), 1)
           << "\" y2=\"" << fixed(f.y(g.q1), 1) << "\"/>\n";
        os << "<line x1=\"" << fixed(mid, 1) << "\" x2=\"" << fixed(mid, 1) << "\" y1=\"" << fixed(f.y(g.q3), 1)
           << "\" y2=\"" << fixed(f.y(g.whisker_hi), 1) << "\"/>\n";
        os << "<rect x=\"" << fixed(mid - half, 1) << "\" y=\"" << fixed(f.y(g.q3), 1) << "\" width=\""
           << fixed(2 * half, 1) << "\" height=\"" << fixed(std::max(f.y(g.q1) - f.y(g.q3), 0.5), 1)
           << "\" fill=\"#a8c4e0\"/>\n";
        os << "<line x1=\"" << fixed(mid - half, 1) << "\" x2=\"" << fixed(mid + half, 1) << "\" y1=\""
           << fixed(f.y(g.median), 1) << "\" y2=\"" << fixed(f.y(g.median), 1) << "\" stroke-width=\"2\"/>\n";
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace chromnet::metrics
