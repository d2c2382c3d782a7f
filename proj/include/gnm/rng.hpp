#ifndef GNM_RNG_HPP
#define GNM_RNG_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gnm/types.hpp"

namespace gnm {

/// The single random stream a chain draws from.
///
/// Distribution objects are created per call, so the engine state alone
/// determines every future draw and can be checkpointed.
class Rng {
  public:
    static constexpr const char* algorithm_id = "mt19937_64";

    explicit Rng(std::uint64_t seed = 5489u) : engine_(seed) {}

    Vector normals(Index n);
    double uniform();                          // [0, 1)
    double uniform(double lo, double hi);      // (lo, hi)
    std::uint64_t next_u64() { return engine_(); }

    /// Engine state as decimal words, in the order the standard library
    /// streams them.
    std::vector<std::string> state() const;
    void set_state(const std::vector<std::string>& words);

    friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

  private:
    std::mt19937_64 engine_;
};

} // namespace gnm

#endif // GNM_RNG_HPP
