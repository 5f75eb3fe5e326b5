#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "punn/netmodel.hpp"

namespace punn {

inline constexpr std::string_view kModelFormatTag = "punn-model/1";

/// Line-oriented text form of a model. Every number is written in shortest
/// round-trip decimal, so deserialize(serialize(m)) == m exactly.
///
///   punn-model/1
///   basis product-unit
///   hidden 1
///   node 1 bias none
///   weights 2 X3 -3.532 X5 -1.415
///   beta 1.046 0.449 0.022 0.131
///   output-bias 0.192 0.318 0.234 0.33
///   input-target 0.1 1.1
///   output-target 0.1 0.9
///   input-map X1 <src_min> <src_max> <dst_lo> <dst_hi>     (40 lines)
///   output-map LAEQ <src_min> <src_max> <dst_lo> <dst_hi>  (4 lines)
///   end
///
/// Lines starting with '#' are comments and are ignored on read.
std::string serialize(const NetworkModel& model);

NetworkModel deserialize(std::string_view text);

/// Writes `# `-prefixed header lines followed by serialize(model), atomically.
void save_model(const std::filesystem::path& path, const NetworkModel& model,
                const std::vector<std::string>& header = {});

NetworkModel load_model(const std::filesystem::path& path);

}  // namespace punn
