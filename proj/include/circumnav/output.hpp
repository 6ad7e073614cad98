#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "circumnav/errors.hpp"
#include "circumnav/metrics.hpp"
#include "circumnav/sim.hpp"

namespace circumnav {

namespace outdetail {

// Fixed 9 significant digits: deterministic and diff-friendly.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + p.string());
    return f;
}

}  // namespace outdetail

// Column layout (per ring position i, 1-based):
//   t, c_x, c_y, r, chat_x, chat_y, rhat, rhat_dot, chat_dot_x, chat_dot_y,
//   p{i}_x, p{i}_y, beta{i}, Dc{i}, Db{i}, u{i}_x, u{i}_y, U{i}_x, U{i}_y
inline std::string trajectory_csv_header(std::size_t n) {
    std::string h = "t,c_x,c_y,r,chat_x,chat_y,rhat,rhat_dot,chat_dot_x,chat_dot_y";
    for (std::size_t i = 1; i <= n; ++i) {
        const std::string s = std::to_string(i);
        h += ",p" + s + "_x,p" + s + "_y,beta" + s + ",Dc" + s + ",Db" + s +
             ",u" + s + "_x,u" + s + "_y,U" + s + "_x,U" + s + "_y";
    }
    return h;
}

inline void write_trajectory_csv(const RunRecord& r, const std::filesystem::path& path) {
    using outdetail::fmt;
    auto f = outdetail::open_out(path);
    f << trajectory_csv_header(r.config.n_agents) << "\n";
    for (const StepRow& s : r.steps) {
        f << fmt(s.t) << ',' << fmt(s.c.x) << ',' << fmt(s.c.y) << ',' << fmt(s.r) << ','
          << fmt(s.c_hat.x) << ',' << fmt(s.c_hat.y) << ',' << fmt(s.r_hat) << ','
          << fmt(s.r_hat_dot) << ',' << fmt(s.c_hat_dot.x) << ',' << fmt(s.c_hat_dot.y);
        for (std::size_t k = 0; k < r.config.n_agents; ++k) {
            f << ',' << fmt(s.p[k].x) << ',' << fmt(s.p[k].y) << ',' << fmt(s.beta[k]) << ','
              << fmt(s.dc[k]) << ',' << fmt(s.db[k]) << ','
              << fmt(s.u_raw[k].x) << ',' << fmt(s.u_raw[k].y) << ','
              << fmt(s.u_applied[k].x) << ',' << fmt(s.u_applied[k].y);
        }
        f << "\n";
    }
}

inline nlohmann::json summary_json(const RunRecord& r, const ErrorSummary& s) {
    nlohmann::json j;
    j["config"] = r.config.echo;
    j["ring_order"] = r.order.perm;
    nlohmann::json sum;
    sum["transient_cutoff"] = s.transient_cutoff;
    sum["max_db"] = s.max_db;
    sum["max_db_overall"] = s.max_db_overall;
    sum["max_centre_error"] = s.max_centre_error;
    sum["max_radius_error"] = s.max_radius_error;
    sum["max_beta_dev"] = s.max_beta_dev;
    sum["max_beta_dev_overall"] = s.max_beta_dev_overall;
    sum["control_violations"] = s.control_violations;
    sum["min_beta"] = s.min_beta;
    sum["min_r_hat"] = s.min_r_hat;
    j["summary"] = sum;
    nlohmann::json events = nlohmann::json::array();
    for (const RunEvent& e : r.events) {
        events.push_back({{"t", e.t}, {"code", e.code}, {"message", e.message}});
    }
    j["invariant_log"] = events;
    j["clips"] = {{"centre", r.centre_clips},
                  {"radius", r.radius_clips},
                  {"radius_floors", r.radius_floors},
                  {"r_hat", r.r_hat_clips}};
    j["invariants_ok"] = r.invariants_ok;
    return j;
}

inline void write_summary_json(const RunRecord& r, const ErrorSummary& s,
                               const std::filesystem::path& path) {
    auto f = outdetail::open_out(path);
    f << summary_json(r, s).dump(2) << "\n";
}

// ---- minimal hand-emitted SVG plots (polyline based, inspection only) ----

class SvgPlot {
public:
    SvgPlot(double width, double height, std::string title)
        : w_(width), h_(height), title_(std::move(title)) {}

    void add_series(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& color) {
        series_.push_back({x, y, color});
        for (double v : x) { xmin_ = std::min(xmin_, v); xmax_ = std::max(xmax_, v); }
        for (double v : y) { ymin_ = std::min(ymin_, v); ymax_ = std::max(ymax_, v); }
    }

    void add_hline(double y, const std::string& color) { hlines_.push_back({y, color}); }

    void write(const std::filesystem::path& path) const {
        auto f = outdetail::open_out(path);
        const double ml = 50.0, mr = 15.0, mt = 30.0, mb = 35.0;
        const double xa = xmin_, xb = xmax_ > xmin_ ? xmax_ : xmin_ + 1.0;
        double ya = ymin_, yb = ymax_ > ymin_ ? ymax_ : ymin_ + 1.0;
        const double pad = 0.05 * (yb - ya);
        ya -= pad; yb += pad;
        auto X = [&](double x) { return ml + (x - xa) / (xb - xa) * (w_ - ml - mr); };
        auto Y = [&](double y) { return h_ - mb - (y - ya) / (yb - ya) * (h_ - mt - mb); };

        f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\""
          << h_ << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
        f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        f << "<text x=\"" << w_ / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\" "
          << "font-family=\"sans-serif\">" << title_ << "</text>\n";
        f << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (w_ - ml - mr)
          << "\" height=\"" << (h_ - mt - mb) << "\" fill=\"none\" stroke=\"#999\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            const double xv = xa + k * (xb - xa) / 4.0;
            const double yv = ya + k * (yb - ya) / 4.0;
            f << "<text x=\"" << X(xv) << "\" y=\"" << h_ - mb + 14
              << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">"
              << outdetail::fmt(xv) << "</text>\n";
            f << "<text x=\"" << ml - 4 << "\" y=\"" << Y(yv) + 3
              << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
              << outdetail::fmt(yv) << "</text>\n";
        }
        for (const auto& [y, color] : hlines_) {
            f << "<line x1=\"" << ml << "\" y1=\"" << Y(y) << "\" x2=\"" << w_ - mr
              << "\" y2=\"" << Y(y) << "\" stroke=\"" << color
              << "\" stroke-dasharray=\"4 3\"/>\n";
        }
        for (const auto& s : series_) {
            f << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
            // thin long series to keep the files small
            const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 2000);
            for (std::size_t i = 0; i < s.x.size(); i += stride) {
                f << X(s.x[i]) << ',' << Y(s.y[i]) << ' ';
            }
            f << "\"/>\n";
        }
        f << "</svg>\n";
    }

private:
    struct Series { std::vector<double> x, y; std::string color; };
    double w_, h_;
    std::string title_;
    std::vector<Series> series_;
    std::vector<std::pair<double, std::string>> hlines_;
    double xmin_ = std::numeric_limits<double>::infinity();
    double xmax_ = -std::numeric_limits<double>::infinity();
    double ymin_ = std::numeric_limits<double>::infinity();
    double ymax_ = -std::numeric_limits<double>::infinity();
};

// Overhead view plus the three time-series panels.
inline void write_plots(const RunRecord& r, const std::filesystem::path& dir) {
    const auto& steps = r.steps;
    const std::size_t n = r.config.n_agents;
    std::vector<double> t;
    t.reserve(steps.size());
    for (const auto& s : steps) t.push_back(s.t);

    static const char* palette[] = {"#1f77b4", "#2ca02c", "#9467bd", "#8c564b",
                                    "#17becf", "#bcbd22", "#e377c2", "#7f7f7f"};

    {
        SvgPlot plot(520, 520, "trajectories (agents blue-ish, centre red, estimate orange)");
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> px, py;
            for (const auto& s : steps) { px.push_back(s.p[k].x); py.push_back(s.p[k].y); }
            plot.add_series(px, py, palette[k % 8]);
        }
        std::vector<double> cx, cy, ex, ey;
        for (const auto& s : steps) {
            cx.push_back(s.c.x); cy.push_back(s.c.y);
            ex.push_back(s.c_hat.x); ey.push_back(s.c_hat.y);
        }
        plot.add_series(cx, cy, "#d62728");
        plot.add_series(ex, ey, "#ff7f0e");
        // final target circle
        std::vector<double> gx, gy;
        for (int k = 0; k <= 128; ++k) {
            const double a = two_pi * k / 128.0;
            gx.push_back(steps.back().c.x + steps.back().r * std::cos(a));
            gy.push_back(steps.back().c.y + steps.back().r * std::sin(a));
        }
        plot.add_series(gx, gy, "#d62728");
        plot.write(dir / "trajectory.svg");
    }
    {
        SvgPlot plot(640, 400, "target truth (red) vs estimate (orange): x, y, r");
        std::vector<double> cx, cy, cr, ex, ey, er;
        for (const auto& s : steps) {
            cx.push_back(s.c.x); cy.push_back(s.c.y); cr.push_back(s.r);
            ex.push_back(s.c_hat.x); ey.push_back(s.c_hat.y); er.push_back(s.r_hat);
        }
        plot.add_series(t, cx, "#d62728");
        plot.add_series(t, ex, "#ff7f0e");
        plot.add_series(t, cy, "#d62728");
        plot.add_series(t, ey, "#ff7f0e");
        plot.add_series(t, cr, "#d62728");
        plot.add_series(t, er, "#ff7f0e");
        plot.write(dir / "estimates.svg");
    }
    {
        SvgPlot plot(640, 400, "boundary distances Db_i and beta_1 (reference dashed)");
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> db;
            for (const auto& s : steps) db.push_back(s.db[k]);
            plot.add_series(t, db, palette[k % 8]);
        }
        std::vector<double> b1;
        for (const auto& s : steps) b1.push_back(s.beta[0]);
        plot.add_series(t, b1, "#e377c2");
        plot.add_hline(two_pi / static_cast<double>(n), "#d62728");
        plot.write(dir / "tracking.svg");
    }
    {
        SvgPlot plot(640, 400, "applied control of agent in position 1 (x, y)");
        std::vector<double> ux, uy;
        for (const auto& s : steps) { ux.push_back(s.u_applied[0].x); uy.push_back(s.u_applied[0].y); }
        plot.add_series(t, ux, "#1f77b4");
        plot.add_series(t, uy, "#2ca02c");
        if (r.config.controller.mode == ActuationMode::saturate) {
            plot.add_hline(r.config.controller.u_max, "#d62728");
            plot.add_hline(-r.config.controller.u_max, "#d62728");
        }
        plot.write(dir / "control.svg");
    }
}

struct OutputBundle {
    std::filesystem::path trajectory_csv;
    std::filesystem::path summary_json_path;
    std::vector<std::filesystem::path> plots;
};

inline OutputBundle write_outputs(const RunRecord& record, const ErrorSummary& summary,
                                  const std::filesystem::path& dir, bool plots = false) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    OutputBundle b;
    b.trajectory_csv = dir / "trajectory.csv";
    b.summary_json_path = dir / "summary.json";
    write_trajectory_csv(record, b.trajectory_csv);
    write_summary_json(record, summary, b.summary_json_path);
    if (plots) {
        write_plots(record, dir);
        b.plots = {dir / "trajectory.svg", dir / "estimates.svg",
                   dir / "tracking.svg", dir / "control.svg"};
    }
    return b;
}

}  // namespace circumnav
