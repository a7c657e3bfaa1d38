#include "coral/report.hpp"

#include "coral/data.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace coral {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

constexpr double kExactFloor = 1e-9;

}  // namespace

std::vector<PerNStat> summarize_rows(const std::vector<ReportRow>& rows) {
    std::vector<std::size_t> ns;
    for (const auto& r : rows)
        if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
    std::sort(ns.begin(), ns.end());
    std::vector<PerNStat> out;
    for (auto n : ns) {
        std::vector<double> vals;
        for (const auto& r : rows)
            if (r.n == n) vals.push_back(r.subopt);
        std::sort(vals.begin(), vals.end());
        const std::size_t k = vals.size();
        PerNStat st;
        st.n = n;
        st.trials = static_cast<int>(k);
        st.median = (vals[(k - 1) / 2] + vals[k / 2]) / 2.0;
        st.q25 = vals[(k - 1) / 4];
        st.q75 = vals[(3 * (k - 1)) / 4];
        out.push_back(st);
    }
    return out;
}

SlopeFit fit_loglog_slope(const std::vector<PerNStat>& per_n) {
    SlopeFit fit;
    std::vector<double> xs, ys;
    for (const auto& st : per_n) {
        if (st.median <= kExactFloor) continue;  // solver-exact regime
        xs.push_back(std::log2(static_cast<double>(st.n)));
        ys.push_back(std::log2(st.median));
    }
    fit.points_used = static_cast<int>(xs.size());
    fit.exact_regime = !per_n.empty() && xs.empty();
    if (xs.size() < 2) return fit;
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.defined = true;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (xs.size() > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
            rss += resid * resid;
        }
        fit.stderr_slope = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

namespace {

std::string csv_line(const ReportRow& r, bool with_runtime) {
    std::ostringstream os;
    os << r.experiment << ',' << r.algorithm << ',' << r.instance << ',' << r.n << ','
       << r.trial << ',' << r.seed << ',' << fmt_double(r.subopt) << ','
       << fmt_double(r.objective) << ',' << fmt_double(r.alpha);
    if (with_runtime) os << ',' << fmt_double(r.runtime_ms);
    return os.str();
}

nlohmann::json summary_json(const ExperimentReport& rep, bool with_clock) {
    nlohmann::json j;
    j["name"] = rep.name;
    j["master_seed"] = rep.master_seed;
    if (!rep.config_echo.empty()) {
        j["config"] = nlohmann::json::parse(rep.config_echo, nullptr, false);
        if (j["config"].is_discarded()) j["config"] = rep.config_echo;
    }
    auto& per_n = j["per_n"] = nlohmann::json::array();
    for (const auto& st : rep.per_n) {
        per_n.push_back({{"N", st.n},
                         {"median", st.median},
                         {"q25", st.q25},
                         {"q75", st.q75},
                         {"trials", st.trials}});
    }
    auto& sl = j["slope"];
    sl["defined"] = rep.slope.defined;
    sl["exact_regime"] = rep.slope.exact_regime;
    sl["points_used"] = rep.slope.points_used;
    if (rep.slope.defined) {
        sl["slope"] = rep.slope.slope;
        sl["stderr"] = rep.slope.stderr_slope;
        sl["intercept"] = rep.slope.intercept;
    }
    auto& metrics = j["metrics"] = nlohmann::json::object();
    for (const auto& [k, v] : rep.metrics) metrics[k] = v;
    auto& checks = j["checks"] = nlohmann::json::object();
    for (const auto& [k, v] : rep.checks) checks[k] = v;
    if (with_clock) j["wall_clock_sec"] = rep.wall_clock_sec;
    return j;
}

}  // namespace

std::uint64_t report_content_digest(const ExperimentReport& report) {
    std::string bytes;
    for (const auto& r : report.rows) {
        bytes += csv_line(r, /*with_runtime=*/false);
        bytes += '\n';
    }
    bytes += summary_json(report, /*with_clock=*/false).dump();
    return fnv1a(bytes);
}

EmittedPaths emit_report(const ExperimentReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    EmittedPaths paths;
    paths.csv = out_dir + "/" + report.name + ".csv";
    paths.json = out_dir + "/" + report.name + ".json";
    {
        std::ofstream os(paths.csv);
        if (!os) throw DataError("cannot open '" + paths.csv + "' for writing");
        os << "experiment,algorithm,instance,N,trial,seed,subopt,objective,alpha,runtime_ms\n";
        for (const auto& r : report.rows) os << csv_line(r, true) << '\n';
    }
    {
        nlohmann::json j = summary_json(report, /*with_clock=*/true);
        char digest[17];
        std::snprintf(digest, sizeof(digest), "%016llx",
                      static_cast<unsigned long long>(report_content_digest(report)));
        j["content_digest"] = digest;
        std::ofstream os(paths.json);
        if (!os) throw DataError("cannot open '" + paths.json + "' for writing");
        os << j.dump(2) << '\n';
    }
    return paths;
}

bool all_checks_pass(const ExperimentReport& report) {
    for (const auto& [name, ok] : report.checks)
        if (!ok) return false;
    return true;
}

}  // namespace coral
