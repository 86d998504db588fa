#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <json.hpp>

#include "rsn/harness.hpp"

namespace rsn {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // fixed newlines on every platform
    if (!out) throw Error("FileError", "cannot write " + path.string());
    return out;
}

struct GroupStats {
    int n = 0;
    double mean = 0.0;
    double ci = 0.0;
};

std::map<std::pair<std::string, int>, GroupStats> group_stats(const MatrixResult& res) {
    std::map<std::pair<std::string, int>, std::vector<double>> vals;
    for (const auto& row : res.rows)
        if (!row.failed) vals[{row.policy, row.r}].push_back(row.J);
    std::map<std::pair<std::string, int>, GroupStats> out;
    for (const auto& [key, v] : vals) {
        GroupStats g;
        g.n = static_cast<int>(v.size());
        for (double x : v) g.mean += x;
        g.mean /= g.n;
        if (g.n >= 2) {
            double var = 0.0;
            for (double x : v) var += (x - g.mean) * (x - g.mean);
            var /= (g.n - 1);
            boost::math::students_t dist(g.n - 1);
            g.ci = boost::math::quantile(dist, 0.975) * std::sqrt(var / g.n);
        }
        out[key] = g;
    }
    return out;
}

}  // namespace

void write_results_csv(const MatrixResult& res, const std::filesystem::path& path) {
    const int I = res.scenario.model.topology.num_resources;
    auto out = open_out(path);
    out << "scenario,policy,r,T,rep,seed,J,J_noburn";
    for (int i = 1; i <= I; ++i) out << ",W_avg_" << i;
    out << ",resA_sup,resS_avg,alloc_drift,wall_ms\n";
    for (const auto& row : res.rows) {
        out << row.scenario << ',' << row.policy << ',' << row.r << ',' << fmt(row.T) << ','
            << row.rep << ',' << row.seed << ',';
        if (row.failed) {
            out << "nan,nan";
            for (int i = 0; i < I; ++i) out << ",nan";
            out << ",nan,nan,nan,nan\n";
            continue;
        }
        out << fmt(row.J) << ',' << fmt(row.J_noburn);
        for (int i = 0; i < I; ++i) out << ',' << fmt(row.W_avg(i));
        out << ',' << fmt(row.resA_sup) << ',' << fmt(row.resS_avg) << ','
            << fmt(row.alloc_drift) << ',' << fmt(row.wall_ms) << '\n';
    }
}

std::string bound_json_string(const BoundReport& bound) {
    nlohmann::ordered_json j;
    j["theta"] = std::vector<double>(bound.theta.data(), bound.theta.data() + bound.theta.size());
    std::vector<std::vector<double>> sigma;
    for (int i = 0; i < bound.Sigma.rows(); ++i) {
        std::vector<double> row;
        for (int c = 0; c < bound.Sigma.cols(); ++c) row.push_back(bound.Sigma(i, c));
        sigma.push_back(std::move(row));
    }
    j["sigma"] = sigma;
    j["stable"] = bound.stable;
    j["bound_kind"] = bound.bound_kind;
    if (std::isinf(bound.bound_value))
        j["bound_value"] = nullptr;  // JSON has no infinity; kind says it all
    else
        j["bound_value"] = bound.bound_value;
    j["ci"] = bound.ci_halfwidth;
    j["monotone_pairs"] = bound.monotone_pairs;
    j["note"] = bound.note;
    return j.dump(2) + "\n";
}

void write_bound_json(const BoundReport& bound, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << bound_json_string(bound);
}

void write_summary(const MatrixResult& res, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "scenario: " << res.scenario.name << "\n";
    out << "bound_kind: " << res.bound.bound_kind << "\n";
    if (res.bound.stable)
        out << "bound: " << fmt(res.bound.bound_value) << " +- " << fmt(res.bound.ci_halfwidth)
            << "\n";
    else
        out << "bound: infinite (unstable drift)\n";
    out << "\npolicy          r     n   mean_J        ci            gap\n";
    const auto stats = group_stats(res);
    for (const auto& policy : res.policies) {
        for (int r : res.scenario.r_grid) {
            auto it = stats.find({policy, r});
            char line[160];
            if (it == stats.end()) {
                std::snprintf(line, sizeof(line), "%-14s %4d %5s %-13s %-13s %s\n",
                              policy.c_str(), r, "0", "n/a", "n/a", "n/a");
            } else {
                const GroupStats& g = it->second;
                const std::string gap = res.bound.stable
                                            ? fmt(g.mean - res.bound.bound_value)
                                            : std::string("n/a");
                std::snprintf(line, sizeof(line), "%-14s %4d %5d %-13s %-13s %s\n",
                              policy.c_str(), r, g.n, fmt(g.mean).c_str(), fmt(g.ci).c_str(),
                              gap.c_str());
            }
            out << line;
        }
    }
    if (res.failed_cells > 0) out << "\nfailed cells: " << res.failed_cells << "\n";
}

void write_svg_plot(const MatrixResult& res, const std::filesystem::path& path) {
    const auto stats = group_stats(res);
    const double W = 640.0, H = 420.0, ml = 60.0, mr = 20.0, mt = 20.0, mb = 50.0;
    double ymax = res.bound.stable ? res.bound.bound_value : 0.0;
    for (const auto& [key, g] : stats) ymax = std::max(ymax, g.mean);
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.15;
    const double rmin = res.scenario.r_grid.front();
    const double rmax = std::max<double>(res.scenario.r_grid.back(), rmin + 1.0);
    auto px = [&](double r) { return ml + (r - rmin) / (rmax - rmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - y / ymax * (H - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << py(0) << "\" x2=\"" << W - mr << "\" y2=\""
        << py(0) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << py(0)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 12)
        << "\" text-anchor=\"middle\" font-size=\"13\">r</text>\n";
    out << "<text x=\"16\" y=\"" << (H / 2)
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " << (H / 2)
        << ")\">mean ergodic cost</text>\n";
    for (int r : res.scenario.r_grid) {
        out << "<text x=\"" << px(r) << "\" y=\"" << (py(0) + 16)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << r << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double y = ymax * k / 4.0;
        out << "<text x=\"" << (ml - 6) << "\" y=\"" << (py(y) + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(y) << "</text>\n";
    }
    if (res.bound.stable) {
        out << "<line x1=\"" << ml << "\" y1=\"" << py(res.bound.bound_value) << "\" x2=\""
            << W - mr << "\" y2=\"" << py(res.bound.bound_value)
            << "\" stroke=\"#444444\" stroke-dasharray=\"6,4\"/>\n";
        out << "<text x=\"" << (W - mr - 4) << "\" y=\"" << (py(res.bound.bound_value) - 5)
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#444444\">bound</text>\n";
    }
    int ci = 0;
    for (const auto& policy : res.policies) {
        const char* color = colors[ci % 5];
        std::string pts;
        for (int r : res.scenario.r_grid) {
            auto it = stats.find({policy, r});
            if (it == stats.end()) continue;
            pts += fmt(px(r)) + "," + fmt(py(it->second.mean)) + " ";
            out << "<circle cx=\"" << px(r) << "\" cy=\"" << py(it->second.mean)
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        if (!pts.empty())
            out << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << (ml + 10) << "\" y=\"" << (mt + 14 + 16 * ci)
            << "\" font-size=\"12\" fill=\"" << color << "\">" << policy << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
    if (!trace.has_event_log)
        throw Error("InvalidArgument", "trace export needs the event log");
    const int I = trace.topology.num_resources;
    const int J = trace.topology.num_types;
    const double rd = trace.rates.r;
    const double r2 = rd * rd;
    const Mat KMr = trace.topology.incidence * trace.rates.M_r;
    const Mat& K = trace.topology.incidence;

    auto out = open_out(path);
    out << "t_scaled,kind,type";
    for (int j = 1; j <= J; ++j) out << ",Q_" << j;
    for (int i = 1; i <= I; ++i) out << ",W_" << i;
    for (int i = 1; i <= I; ++i) out << ",U_" << i;
    out << '\n';
    static const char* kinds[] = {"arrival", "completion", "review"};
    for (long long e = 0; e < trace.n_events(); ++e) {
        const double tu = trace.event_time[static_cast<std::size_t>(e)];
        Vec q(J), cumB(J);
        for (int j = 0; j < J; ++j) {
            q(j) = trace.event_queue[static_cast<std::size_t>(e * J + j)];
            cumB(j) = trace.event_alloc[static_cast<std::size_t>(e * J + j)];
        }
        const Vec w = (KMr * q) / rd;
        const Vec u = (tu * trace.topology.capacity - K * cumB) / rd;
        out << fmt(tu / r2) << ','
            << kinds[static_cast<int>(trace.event_kind[static_cast<std::size_t>(e)])] << ','
            << (trace.event_type[static_cast<std::size_t>(e)] + 1);
        for (int j = 0; j < J; ++j) out << ',' << fmt(q(j));
        for (int i = 0; i < I; ++i) out << ',' << fmt(w(i));
        for (int i = 0; i < I; ++i) out << ',' << fmt(u(i));
        out << '\n';
    }
}

void write_reports(const MatrixResult& res, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_results_csv(res, out_dir / "results.csv");
    write_bound_json(res.bound, out_dir / "bound.json");
    write_summary(res, out_dir / "summary.txt");
    write_svg_plot(res, out_dir / "plot.svg");
}

}  // namespace rsn
