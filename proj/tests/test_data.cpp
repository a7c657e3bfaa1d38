#include "coral/data.hpp"
#include "coral/instances.hpp"
#include "coral/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace coral;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// independent line-oriented parser used to cross-check the JSONL reader
std::vector<Record> second_parser(const std::string& path) {
    std::ifstream is(path);
    std::vector<Record> out;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (first) {  // header
            first = false;
            continue;
        }
        Record rec{};
        double r = 0.0;
        if (std::sscanf(line.c_str(), "{\"s\":%d,\"a\":%d,\"r\":%lf,\"sn\":%d}",
                        &rec.s, &rec.a, &r, &rec.s_next) == 4) {
            rec.r = r;
            out.push_back(rec);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("point-mass sampling is degenerate") {
    Mat trans(2, 1);
    trans << 1, 1;
    Mat rewards(1, 2);
    rewards << 0.7, 0.2;
    TabularModel m(1, 2, trans, rewards,
                   std::vector<RewardKind>(2, RewardKind::deterministic), Vec::Ones(1), 0.0);
    Mat mu(1, 2);
    mu << 1.0, 0.0;
    const OfflineDataset d = sample_offline(m, DataDistribution(mu), 50, 99);
    for (const auto& rec : d.records) {
        CHECK(rec.a == 0);
        CHECK(rec.r == 0.7);
        CHECK(rec.s_next == 0);
    }
}

TEST_CASE("empirical frequencies follow mu") {
    Instance inst = prop1(1u << 20);
    const std::size_t n = 1u << 20;
    const OfflineDataset d = sample_offline(inst.model, inst.mu, n, 1234);
    std::size_t arm2 = 0;
    for (const auto& rec : d.records) arm2 += rec.a == 1;
    const double p = 2.0 / static_cast<double>(n);
    const double sigma = std::sqrt(p * (1 - p) * n);
    CHECK(std::abs(static_cast<double>(arm2) - p * n) <= 3.0 * sigma + 1e-9);
}

TEST_CASE("bernoulli rewards have the right mean") {
    Mat trans(2, 1);
    trans << 1, 1;
    Mat rewards(1, 2);
    rewards << 1.0 / 3.0, 0.5;
    TabularModel m(1, 2, trans, rewards,
                   std::vector<RewardKind>{RewardKind::bernoulli, RewardKind::deterministic},
                   Vec::Ones(1), 0.0);
    Mat mu(1, 2);
    mu << 1.0, 0.0;
    const OfflineDataset d = sample_offline(m, DataDistribution(mu), 100000, 321);
    double mean = 0.0;
    for (const auto& rec : d.records) mean += rec.r;
    mean /= d.size();
    CHECK(std::abs(mean - 1.0 / 3.0) < 0.01);
}

TEST_CASE("determinism and seed separation") {
    Instance inst = rate_cb33(512);
    const OfflineDataset a = sample_offline(inst.model, inst.mu, 500, 7);
    const OfflineDataset b = sample_offline(inst.model, inst.mu, 500, 7);
    const OfflineDataset c = sample_offline(inst.model, inst.mu, 500, 8);
    REQUIRE(a.size() == b.size());
    bool equal = true, differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        equal &= a.records[i].s == b.records[i].s && a.records[i].a == b.records[i].a &&
                 a.records[i].r == b.records[i].r && a.records[i].s_next == b.records[i].s_next;
        differs |= a.records[i].a != c.records[i].a || a.records[i].s != c.records[i].s;
    }
    CHECK(equal);
    CHECK(differs);
    CHECK(derive_seed(7, 1, 2) != derive_seed(7, 2, 1));
}

TEST_CASE("initial-state sampling") {
    Mat trans(2, 1);
    trans << 1, 1;
    Mat rewards(1, 2);
    rewards << 0.5, 0.5;
    TabularModel point(1, 2, trans, rewards,
                       std::vector<RewardKind>(2, RewardKind::deterministic), Vec::Ones(1), 0.0);
    const InitialDataset init = sample_initial(point, 100, 5);
    for (auto s : init.states) CHECK(s == 0);

    // chi-square against a uniform initial distribution over 4 states
    const TabularModel m = random_mdp(4, 2, 0.5, 17);
    Mat t2 = m.transitions();
    TabularModel uniform_init(4, 2, t2, m.reward_mean(),
                              std::vector<RewardKind>(8, RewardKind::deterministic),
                              Vec::Constant(4, 0.25), 0.5);
    const std::size_t n0 = 100000;
    const InitialDataset big = sample_initial(uniform_init, n0, 6);
    Vec counts = Vec::Zero(4);
    for (auto s : big.states) counts[s] += 1.0;
    double chi2 = 0.0;
    for (int s = 0; s < 4; ++s) {
        const double expect = n0 * 0.25;
        chi2 += (counts[s] - expect) * (counts[s] - expect) / expect;
    }
    CHECK(chi2 < 11.345);  // 99th percentile, 3 dof
}

TEST_CASE("thin-state frequency in the prop3 instance") {
    const std::size_t n = 1u << 16;
    Instance inst = prop3_small(n, 1.0 / n);
    const InitialDataset init = sample_initial(inst.model, 1000000, 77);
    double f = 0.0;
    for (auto s : init.states) f += s == 0;
    f /= init.states.size();
    const double rho1 = std::pow(static_cast<double>(n), -0.25);
    CHECK(std::abs(f - rho1) < 3.0 * std::sqrt(rho1 * (1 - rho1) / 1e6));
}

TEST_CASE("jsonl round trips") {
    Instance inst = prop1(64);
    const std::string path = tmp_path("coral_test_offline.jsonl");

    OfflineDataset empty;
    empty.seed = 3;
    save_offline(empty, path);
    CHECK(load_offline(path).records.empty());

    const OfflineDataset d = sample_offline(inst.model, inst.mu, 1000, 11);
    save_offline(d, path);
    const OfflineDataset back = load_offline(path);
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(back.records[i].s == d.records[i].s);
        CHECK(back.records[i].a == d.records[i].a);
        CHECK(back.records[i].r == d.records[i].r);
        CHECK(back.records[i].s_next == d.records[i].s_next);
    }

    const InitialDataset init = sample_initial(inst.model, 200, 12);
    save_initial(init, path);
    CHECK(load_initial(path).states == init.states);

    const ModelDataset md = sample_model_data(inst.model, inst.mu, 200, 13);
    save_model_data(md, path);
    const ModelDataset mdb = load_model_data(path);
    REQUIRE(mdb.records.size() == md.records.size());
    for (std::size_t i = 0; i < md.records.size(); ++i)
        CHECK(mdb.records[i].s_next == md.records[i].s_next);
}

TEST_CASE("jsonl loader agrees with an independent parser on random files") {
    Instance inst = prop3_small(1024, 1e-3);
    const std::string path = tmp_path("coral_test_second.jsonl");
    for (int k = 0; k < 100; ++k) {
        const OfflineDataset d = sample_offline(inst.model, inst.mu, 50 + k, 4000 + k);
        save_offline(d, path);
        const OfflineDataset ours = load_offline(path);
        const std::vector<Record> theirs = second_parser(path);
        REQUIRE(theirs.size() == ours.size());
        for (std::size_t i = 0; i < theirs.size(); ++i) {
            CHECK(theirs[i].s == ours.records[i].s);
            CHECK(theirs[i].a == ours.records[i].a);
            CHECK(theirs[i].r == doctest::Approx(ours.records[i].r).epsilon(1e-15));
            CHECK(theirs[i].s_next == ours.records[i].s_next);
        }
    }
}

TEST_CASE("malformed and truncated files are rejected with line numbers") {
    const std::string path = tmp_path("coral_test_bad.jsonl");
    {
        std::ofstream os(path);
        os << "{\"kind\":\"offline\",\"seed\":1,\"n\":2,\"digest\":\"x\"}\n";
        os << "{\"s\":0,\"a\":0,\"r\":0.5,\"sn\":0}\n";
        os << "not json\n";
    }
    CHECK_THROWS_WITH_AS(load_offline(path),
                         doctest::Contains("line 3"), DataError);
    {
        std::ofstream os(path);
        os << "{\"kind\":\"offline\",\"seed\":1,\"n\":2,\"digest\":\"x\"}\n";
        os << "{\"s\":0,\"a\":0,\"r\":0.5,\"sn\":0}\n";
    }
    CHECK_THROWS_AS(load_offline(path), DataError);  // count mismatch
    CHECK_THROWS_AS(sample_offline(random_mab(2, 1), random_mu(1, 2, 2), 0, 3),
                    std::invalid_argument);
}

TEST_CASE("marginal consistency at scale") {
    Instance inst = rate_cb33(4096);
    const std::size_t n = 100000;
    for (int rep = 0; rep < 3; ++rep) {
        const OfflineDataset d = sample_offline(inst.model, inst.mu, n, 50 + rep);
        Mat freq = Mat::Zero(3, 3);
        for (const auto& rec : d.records) freq(rec.s, rec.a) += 1.0;
        freq /= static_cast<double>(n);
        const double tv = 0.5 * (freq - inst.mu.joint()).cwiseAbs().sum();
        CHECK(tv < 5.0 / std::sqrt(static_cast<double>(n)));
    }
}
