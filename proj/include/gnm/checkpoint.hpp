#ifndef GNM_CHECKPOINT_HPP
#define GNM_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gnm/kernel.hpp"
#include "gnm/posterior.hpp"

namespace gnm {

/// Everything needed to resume a chain, in file order.
struct CheckpointData {
    static constexpr int format_version = 1;

    Index dim = 0;
    std::vector<double> chain;   // row-major, dim columns
    std::int64_t n_samples = 0;
    std::uint64_t n_accepted = 0;
    std::uint64_t call_count = 0;
    std::int64_t burned = 0;
    std::map<int, std::uint64_t> step_count;
    BackoffPolicy policy;
    GaussianPrior prior;
    Vector current_x;
    std::string rng_algorithm;
    std::vector<std::string> rng_state;
};

/// JSON text with fixed field order, 17 significant digits per number and a
/// trailing CRC-32 over the canonical serialization of every other field.
std::string serialize_checkpoint(const CheckpointData& data);
CheckpointData parse_checkpoint(const std::string& text);

/// Writes through a temporary file and a rename. Throws CheckpointWriteFailure.
void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data);
/// Throws IOFailure or CorruptCheckpoint.
CheckpointData read_checkpoint(const std::filesystem::path& path);

} // namespace gnm

#endif // GNM_CHECKPOINT_HPP
