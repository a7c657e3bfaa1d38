#pragma once

#include "coral/env.hpp"
#include "coral/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace coral {

/// Joint offline data distribution mu(s,a) plus its marginal and conditional.
/// States with mu(s) = 0 get a uniform conditional so downstream policy maps
/// stay total.
class DataDistribution {
public:
    explicit DataDistribution(Mat joint);

    const Mat& joint() const { return joint_; }
    const Vec& marginal() const { return marginal_; }
    const Mat& conditional() const { return conditional_; }
    double operator()(int s, int a) const { return joint_(s, a); }
    int n_states() const { return static_cast<int>(joint_.rows()); }
    int n_actions() const { return static_cast<int>(joint_.cols()); }

private:
    Mat joint_;        // S x A
    Vec marginal_;     // S
    Mat conditional_;  // S x A, rows sum to 1
};

struct Record {
    std::int32_t s;
    std::int32_t a;
    double r;
    std::int32_t s_next;
};

struct OfflineDataset {
    std::vector<Record> records;
    std::uint64_t seed = 0;
    std::string source_hash;  // digest of (model, mu) the sampler used

    std::size_t size() const { return records.size(); }
};

struct InitialDataset {
    std::vector<std::int32_t> states;
    std::uint64_t seed = 0;
};

struct ModelDataset {
    struct Transition { std::int32_t s, a, s_next; };
    std::vector<Transition> records;
    std::uint64_t seed = 0;
};

/// i.i.d. (s,a) ~ mu, r ~ R(s,a), s' ~ P(.|s,a). Bit-identical per seed.
OfflineDataset sample_offline(const TabularModel& model, const DataDistribution& mu,
                              std::size_t n, std::uint64_t seed);

InitialDataset sample_initial(const TabularModel& model, std::size_t n0, std::uint64_t seed);

ModelDataset sample_model_data(const TabularModel& model, const DataDistribution& mu,
                               std::size_t nm, std::uint64_t seed);

/// FNV-1a over a canonical byte serialization; used for dataset digests.
std::uint64_t fnv1a(const std::string& bytes);
std::string model_mu_digest(const TabularModel& model, const DataDistribution& mu);

// JSON-Lines persistence. Header line carries {"kind","seed","n","digest"};
// the digest detects truncated or edited files on load.
void save_offline(const OfflineDataset& data, const std::string& path);
OfflineDataset load_offline(const std::string& path);
void save_initial(const InitialDataset& data, const std::string& path);
InitialDataset load_initial(const std::string& path);
void save_model_data(const ModelDataset& data, const std::string& path);
ModelDataset load_model_data(const std::string& path);

}  // namespace coral
