#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace l0erm {

/// Root seed plus a path of stream labels. Every (value, labels) pair names
/// an independent, reproducible stream.
///
/// Key derivation: h = splitmix64(value); then for each label,
/// h = splitmix64(h ^ fnv1a64(label)). The stream is std::mt19937_64 seeded
/// with h, whose output sequence is fixed by the C++ standard.
class Seed {
public:
    Seed() = default;
    explicit Seed(std::uint64_t value) : value_(value) {}
    Seed(std::uint64_t value, std::vector<std::string> labels)
        : value_(value), labels_(std::move(labels)) {}

    std::uint64_t value() const { return value_; }
    const std::vector<std::string>& labels() const { return labels_; }

    Seed child(std::string label) const;
    /// 64-bit key of this stream.
    std::uint64_t key() const;
    /// "value/label1/label2".
    std::string describe() const;

    friend bool operator==(const Seed&, const Seed&) = default;

private:
    std::uint64_t value_ = 0;
    std::vector<std::string> labels_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(const std::string& text);

/// Portable sampler. Gaussians use the Box-Muller transform (both outputs
/// used, cosine first); uniforms take the top 53 bits of the engine output.
class Rng {
public:
    explicit Rng(const Seed& seed) : engine_(seed.key()) {}
    explicit Rng(std::uint64_t key) : engine_(key) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on (0, 1].
    double uniform_open_zero();
    /// Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t uniform_index(std::uint64_t bound);
    double normal();

    static constexpr const char* kGaussianTransform = "box-muller";
    static constexpr const char* kEngine = "mt19937_64";

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace l0erm
