#include "coral/data.hpp"

#include "coral/rng.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace coral {

DataDistribution::DataDistribution(Mat joint) : joint_(std::move(joint)) {
    if (joint_.minCoeff() < 0.0)
        throw std::invalid_argument("mu has a negative entry");
    if (std::abs(joint_.sum() - 1.0) > kProbTol)
        throw std::invalid_argument("mu does not sum to 1");
    marginal_ = joint_.rowwise().sum();
    const int S = static_cast<int>(joint_.rows()), A = static_cast<int>(joint_.cols());
    conditional_ = Mat(S, A);
    for (int s = 0; s < S; ++s) {
        if (marginal_[s] > 0.0)
            conditional_.row(s) = joint_.row(s) / marginal_[s];
        else
            conditional_.row(s).setConstant(1.0 / A);  // never appears in data
    }
}

OfflineDataset sample_offline(const TabularModel& model, const DataDistribution& mu,
                              std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample_offline: n must be >= 1");
    if (mu.n_states() != model.n_states() || mu.n_actions() != model.n_actions())
        throw std::invalid_argument("sample_offline: mu/model dimension mismatch");
    const int S = model.n_states(), A = model.n_actions();
    // flattened cdf over (s,a)
    std::vector<double> cdf(S * A);
    double acc = 0.0;
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) cdf[s * A + a] = (acc += mu(s, a));
    Rng rng(seed);
    OfflineDataset out;
    out.seed = seed;
    out.source_hash = model_mu_digest(model, mu);
    out.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform01() * acc;
        int sa = 0;
        while (sa + 1 < S * A && u >= cdf[sa]) ++sa;
        const int s = sa / A, a = sa % A;
        double r = model.reward_mean()(s, a);
        if (model.reward_kind(s, a) == RewardKind::bernoulli)
            r = rng.bernoulli(r) ? 1.0 : 0.0;
        const int sn = rng.categorical(model.next_dist(s, a).transpose());
        out.records.push_back({s, a, r, sn});
    }
    return out;
}

InitialDataset sample_initial(const TabularModel& model, std::size_t n0, std::uint64_t seed) {
    if (n0 == 0) throw std::invalid_argument("sample_initial: n0 must be >= 1");
    Rng rng(seed);
    InitialDataset out;
    out.seed = seed;
    out.states.reserve(n0);
    for (std::size_t i = 0; i < n0; ++i)
        out.states.push_back(rng.categorical(model.initial()));
    return out;
}

ModelDataset sample_model_data(const TabularModel& model, const DataDistribution& mu,
                               std::size_t nm, std::uint64_t seed) {
    if (nm == 0) throw std::invalid_argument("sample_model_data: nm must be >= 1");
    const int A = model.n_actions();
    Rng rng(seed);
    ModelDataset out;
    out.seed = seed;
    out.records.reserve(nm);
    Vec flat(mu.n_states() * A);
    for (int s = 0; s < mu.n_states(); ++s)
        for (int a = 0; a < A; ++a) flat[s * A + a] = mu(s, a);
    for (std::size_t i = 0; i < nm; ++i) {
        const int sa = rng.categorical(flat);
        const int s = sa / A, a = sa % A;
        const int sn = rng.categorical(model.next_dist(s, a).transpose());
        out.records.push_back({s, a, sn});
    }
    return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// shortest round-trip double formatting
std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string model_mu_digest(const TabularModel& model, const DataDistribution& mu) {
    std::ostringstream os;
    os << model.to_json() << '|';
    for (int s = 0; s < mu.n_states(); ++s)
        for (int a = 0; a < mu.n_actions(); ++a) os << fmt_double(mu(s, a)) << ',';
    return hex64(fnv1a(os.str()));
}

namespace {

std::string offline_digest(const std::vector<Record>& records) {
    std::string bytes;
    bytes.reserve(records.size() * 24);
    for (const auto& rec : records) {
        bytes += std::to_string(rec.s);
        bytes += ',';
        bytes += std::to_string(rec.a);
        bytes += ',';
        bytes += fmt_double(rec.r);
        bytes += ',';
        bytes += std::to_string(rec.s_next);
        bytes += ';';
    }
    return hex64(fnv1a(bytes));
}

nlohmann::json parse_line(const std::string& line, std::size_t lineno) {
    try {
        return nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed json at line " + std::to_string(lineno) + ": " + e.what());
    }
}

void write_header(std::ofstream& os, const std::string& kind, std::uint64_t seed,
                  std::size_t n, const std::string& digest) {
    nlohmann::json h;
    h["kind"] = kind;
    h["seed"] = seed;
    h["n"] = n;
    h["digest"] = digest;
    os << h.dump() << '\n';
}

nlohmann::json read_header(std::ifstream& is, const std::string& kind) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty dataset file");
    nlohmann::json h = parse_line(line, 1);
    if (!h.contains("kind") || h["kind"] != kind)
        throw DataError("dataset header kind mismatch (expected '" + kind + "')");
    return h;
}

}  // namespace

void save_offline(const OfflineDataset& data, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open '" + path + "' for writing");
    write_header(os, "offline", data.seed, data.records.size(), offline_digest(data.records));
    for (const auto& rec : data.records) {
        os << "{\"s\":" << rec.s << ",\"a\":" << rec.a << ",\"r\":" << fmt_double(rec.r)
           << ",\"sn\":" << rec.s_next << "}\n";
    }
}

OfflineDataset load_offline(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open '" + path + "'");
    nlohmann::json h = read_header(is, "offline");
    OfflineDataset out;
    out.seed = h.value("seed", std::uint64_t{0});
    const std::size_t n = h.at("n").get<std::size_t>();
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = parse_line(line, lineno);
        try {
            out.records.push_back({j.at("s").get<std::int32_t>(), j.at("a").get<std::int32_t>(),
                                   j.at("r").get<double>(), j.at("sn").get<std::int32_t>()});
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bad record at line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (out.records.size() != n)
        throw DataError("record count mismatch: header says " + std::to_string(n) + ", found " +
                        std::to_string(out.records.size()));
    if (offline_digest(out.records) != h.at("digest").get<std::string>())
        throw DataError("dataset digest mismatch (file corrupted or truncated)");
    return out;
}

void save_initial(const InitialDataset& data, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open '" + path + "' for writing");
    std::string bytes;
    for (auto s : data.states) {
        bytes += std::to_string(s);
        bytes += ';';
    }
    write_header(os, "initial", data.seed, data.states.size(), hex64(fnv1a(bytes)));
    for (auto s : data.states) os << "{\"s\":" << s << "}\n";
}

InitialDataset load_initial(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open '" + path + "'");
    nlohmann::json h = read_header(is, "initial");
    InitialDataset out;
    out.seed = h.value("seed", std::uint64_t{0});
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        out.states.push_back(parse_line(line, lineno).at("s").get<std::int32_t>());
    }
    if (out.states.size() != h.at("n").get<std::size_t>())
        throw DataError("record count mismatch in '" + path + "'");
    std::string bytes;
    for (auto s : out.states) {
        bytes += std::to_string(s);
        bytes += ';';
    }
    if (hex64(fnv1a(bytes)) != h.at("digest").get<std::string>())
        throw DataError("dataset digest mismatch (file corrupted or truncated)");
    return out;
}

void save_model_data(const ModelDataset& data, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open '" + path + "' for writing");
    std::string bytes;
    for (const auto& t : data.records) {
        bytes += std::to_string(t.s) + "," + std::to_string(t.a) + "," +
                 std::to_string(t.s_next) + ";";
    }
    write_header(os, "model", data.seed, data.records.size(), hex64(fnv1a(bytes)));
    for (const auto& t : data.records)
        os << "{\"s\":" << t.s << ",\"a\":" << t.a << ",\"sn\":" << t.s_next << "}\n";
}

ModelDataset load_model_data(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open '" + path + "'");
    nlohmann::json h = read_header(is, "model");
    ModelDataset out;
    out.seed = h.value("seed", std::uint64_t{0});
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = parse_line(line, lineno);
        out.records.push_back({j.at("s").get<std::int32_t>(), j.at("a").get<std::int32_t>(),
                               j.at("sn").get<std::int32_t>()});
    }
    if (out.records.size() != h.at("n").get<std::size_t>())
        throw DataError("record count mismatch in '" + path + "'");
    std::string bytes;
    for (const auto& t : out.records) {
        bytes += std::to_string(t.s) + "," + std::to_string(t.a) + "," +
                 std::to_string(t.s_next) + ";";
    }
    if (hex64(fnv1a(bytes)) != h.at("digest").get<std::string>())
        throw DataError("dataset digest mismatch (file corrupted or truncated)");
    return out;
}

}  // namespace coral
