#pragma once

#include <map>
#include <string>

#include "qrl/nn/network.hpp"

namespace qrl::nn {

// On-disk network snapshot. The file starts with the magic line `QRLNET1`,
// followed by a text header (name, step counter, rng state, meta entries,
// layer list, tensor shapes), a `data` line, then all parameter tensors as
// little-endian float32 in declaration order (w then b per layer).
struct NetCheckpoint {
    std::string name;
    long step = 0;
    std::string rng_state; // empty when not saved
    std::map<std::string, std::string> meta;
    ParameterSet params;   // widened back to double on load
};

void save_net_checkpoint(const std::string& path, const NetworkSpec& net, const ParameterSet& params,
                         long step, const std::string& rng_state = "",
                         const std::map<std::string, std::string>& meta = {});

// Loads and validates tensor shapes against the header. Rebuild the network
// with build_network_by_name(result.name).
NetCheckpoint load_net_checkpoint(const std::string& path);

} // namespace qrl::nn
