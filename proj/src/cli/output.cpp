#include "noslip/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace noslip::cli {

namespace {

std::string fmt(const char* spec, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw std::runtime_error("trajectory CSV line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

std::string color_for(std::size_t orbit) {
    // Golden-angle hues keep neighbouring orbit ids apart.
    const double hue = std::fmod(static_cast<double>(orbit) * 137.50776405003785, 360.0);
    return "hsl(" + fmt("%.1f", hue) + ",70%,40%)";
}

struct Box {
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity();
    double x1 = -std::numeric_limits<double>::infinity();
    double y1 = -std::numeric_limits<double>::infinity();

    void add(const Vec2& p) {
        x0 = std::min(x0, p.x());
        y0 = std::min(y0, p.y());
        x1 = std::max(x1, p.x());
        y1 = std::max(y1, p.y());
    }
    bool empty() const { return !(x1 >= x0); }
};

// Maps model coordinates into a 600-px square with y up.
struct View {
    Box box;
    double scale = 1.0;
    static constexpr double kSize = 600.0;
    static constexpr double kPad = 20.0;

    explicit View(Box b) : box(b) {
        const double span = std::max({box.x1 - box.x0, box.y1 - box.y0, 1e-12});
        scale = (kSize - 2 * kPad) / span;
    }
    std::string x(double v) const { return fmt6(kPad + (v - box.x0) * scale); }
    std::string y(double v) const { return fmt6(kSize - kPad - (v - box.y0) * scale); }
};

std::string svg_open(const std::string& title) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n"
           "<title>" + title + "</title>\n"
           "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
}

}  // namespace

std::string fmt17(double x) { return fmt("%.17g", x); }
std::string fmt6(double x) { return fmt("%.6g", x); }

std::vector<TrajectoryRow> trajectory_rows(const TrajectoryRecord& record) {
    std::vector<TrajectoryRow> rows;
    rows.reserve(record.states.size());
    for (std::size_t k = 0; k < record.states.size(); ++k) {
        const State& xi = record.states[k];
        const Vec2 u = velocity_coords(xi);
        TrajectoryRow r;
        r.step = k;
        r.piece = xi.loc.piece_index;
        r.s = xi.loc.s;
        r.pos_x = xi.loc.position.x();
        r.pos_y = xi.loc.position.y();
        r.u1 = u.x();
        r.u2 = u.y();
        r.flight_time = k == 0 ? 0.0 : record.flight_times[k - 1];
        rows.push_back(r);
    }
    if (!rows.empty()) rows.back().termination = std::string(to_string(record.termination));
    return rows;
}

std::string trajectory_csv(const TrajectoryRecord& record) {
    std::string out = std::string(kTrajectoryHeader) + "\n";
    for (const TrajectoryRow& r : trajectory_rows(record)) {
        out += std::to_string(r.step) + "," + std::to_string(r.piece) + "," + fmt17(r.s) + "," +
               fmt17(r.pos_x) + "," + fmt17(r.pos_y) + "," + fmt17(r.u1) + "," + fmt17(r.u2) + "," +
               fmt17(r.flight_time) + "," + r.termination + "\n";
    }
    return out;
}

std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader)
        throw std::runtime_error("trajectory CSV: unexpected header");
    std::vector<TrajectoryRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> c = split_csv(line);
        if (c.size() != 9)
            throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) + ": expected 9 fields");
        TrajectoryRow r;
        r.step = static_cast<std::size_t>(parse_double(c[0], lineno));
        r.piece = static_cast<std::size_t>(parse_double(c[1], lineno));
        r.s = parse_double(c[2], lineno);
        r.pos_x = parse_double(c[3], lineno);
        r.pos_y = parse_double(c[4], lineno);
        r.u1 = parse_double(c[5], lineno);
        r.u2 = parse_double(c[6], lineno);
        r.flight_time = parse_double(c[7], lineno);
        r.termination = c[8];
        rows.push_back(r);
    }
    return rows;
}

std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trajectory_csv(ss.str());
}

State state_from_row(const Table& table, const TrajectoryRow& row) {
    return state_from_coords(frame_at(table, row.piece, row.s), row.u1, row.u2);
}

std::string portrait_csv(const std::vector<PortraitPoint>& points) {
    std::string out = "u1,u2,orbit_id\n";
    for (const PortraitPoint& p : points)
        out += fmt17(p.u1) + "," + fmt17(p.u2) + "," + std::to_string(p.orbit) + "\n";
    return out;
}

std::string portrait_svg(const std::vector<PortraitPoint>& points, const std::string& title) {
    Box b;
    b.add({-1.0, -1.0});
    b.add({1.0, 1.0});
    const View v(b);
    std::string out = svg_open(title);
    out += "<circle cx=\"" + v.x(0) + "\" cy=\"" + v.y(0) + "\" r=\"" + fmt6(v.scale) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    std::size_t current = std::numeric_limits<std::size_t>::max();
    for (const PortraitPoint& p : points) {
        if (p.orbit != current) {
            if (current != std::numeric_limits<std::size_t>::max()) out += "</g>\n";
            current = p.orbit;
            out += "<g fill=\"" + color_for(current) + "\">\n";
        }
        out += "<rect x=\"" + v.x(p.u1) + "\" y=\"" + v.y(p.u2) + "\" width=\"1\" height=\"1\"/>\n";
    }
    if (current != std::numeric_limits<std::size_t>::max()) out += "</g>\n";
    return out + "</svg>\n";
}

std::string trajectory_svg(const Table& table, const std::vector<TrajectoryRecord>& records) {
    Box b;
    const auto* torus = std::get_if<Torus>(&table.topology());
    if (torus) {
        b.add({0.0, 0.0});
        b.add({torus->period_x, torus->period_y});
    } else {
        for (const TrajectoryRecord& r : records)
            for (const State& s : r.states) b.add(s.loc.position);
        if (b.empty() || (b.x1 - b.x0 < 1e-9 && b.y1 - b.y0 < 1e-9))
            for (const Piece& p : table.pieces())
                for (int k = 0; k <= 64; ++k) b.add(p.point(p.length() * k / 64));
    }
    const double margin = 0.05 * std::max(b.x1 - b.x0, b.y1 - b.y0);
    b.x0 -= margin;
    b.y0 -= margin;
    b.x1 += margin;
    b.y1 += margin;
    const View v(b);

    std::string out = svg_open("planar trajectory");
    out += "<defs><clipPath id=\"view\"><rect x=\"" + v.x(b.x0) + "\" y=\"" + v.y(b.y1) +
           "\" width=\"" + fmt6((b.x1 - b.x0) * v.scale) + "\" height=\"" +
           fmt6((b.y1 - b.y0) * v.scale) + "\"/></clipPath></defs>\n";
    out += "<g clip-path=\"url(#view)\">\n";
    if (torus) {
        out += "<rect x=\"" + v.x(0) + "\" y=\"" + v.y(torus->period_y) + "\" width=\"" +
               fmt6(torus->period_x * v.scale) + "\" height=\"" + fmt6(torus->period_y * v.scale) +
               "\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (const Piece& p : table.pieces()) {
        out += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
        const int n = p.is_segment() ? 1 : 128;
        for (int k = 0; k <= n; ++k) {
            const Vec2 q = p.point(p.length() * k / n);
            out += (k ? " " : "") + v.x(q.x()) + "," + v.y(q.y());
        }
        out += "\"/>\n";
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TrajectoryRecord& r = records[i];
        out += "<g stroke=\"" + color_for(i) + "\" stroke-width=\"0.75\" fill=\"none\">\n";
        for (std::size_t k = 0; k + 1 < r.states.size(); ++k) {
            // Flights are drawn from the departure point along the planar
            // velocity, which stays correct when the torus wraps the arrival.
            const Vec2 a = r.states[k].loc.position;
            const Vec2 e = a + r.flight_times[k] * plane_part(r.states[k].v);
            out += "<line x1=\"" + v.x(a.x()) + "\" y1=\"" + v.y(a.y()) + "\" x2=\"" + v.x(e.x()) +
                   "\" y2=\"" + v.y(e.y()) + "\"/>\n";
        }
        out += "</g>\n";
    }
    return out + "</g>\n</svg>\n";
}

nlohmann::json to_json(const CheckReport& r) {
    return {{"check", r.check_name},     {"samples", r.samples},       {"skipped", r.skipped},
            {"max_error", r.max_error},  {"median_error", r.median_error},
            {"p90_error", r.p90_error},  {"tolerance", r.tolerance},   {"pass", r.pass},
            {"details", r.details}};
}

nlohmann::json to_json(const StabilityReport& r) {
    nlohmann::json eig = nlohmann::json::array();
    for (const auto& z : r.eigenvalues) eig.push_back({z.real(), z.imag()});
    nlohmann::json j = {{"trace", r.trace}, {"eigenvalues", eig}, {"class", std::string(to_string(r.cls))}};
    if (r.thresholds) {
        j["zeta"] = r.thresholds->zeta;
        j["zeta0"] = r.thresholds->zeta0;
        j["critical_radius"] = r.thresholds->critical_radius;
    } else {
        j["zeta"] = nullptr;
        j["zeta0"] = nullptr;
        j["critical_radius"] = nullptr;
    }
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace noslip::cli
