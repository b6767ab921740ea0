#pragma once

#include <iosfwd>
#include <string>

#include "repnet/replearn.hpp"

namespace repnet {

/// Text persistence for networks. Format (one token group per line):
///   repnet-net v1
///   activation <name>
///   dims <d0> <d1> ... <dk>
///   params <count>
///   <count> parameter lines in the canonical flat order, 17 significant
///   digits (lossless for doubles).
/// MultiTaskNet files wrap one f block and n head blocks:
///   repnet-mtnet v1
///   heads <n>
///   ...net blocks...
/// Malformed input raises std::runtime_error naming the offending line; no
/// partially constructed object escapes.
void save_net(std::ostream& os, const Network& net);
void save_net(const std::string& path, const Network& net);
Network load_net(std::istream& is);
Network load_net(const std::string& path);

void save_net(std::ostream& os, const MultiTaskNet& net);
void save_net(const std::string& path, const MultiTaskNet& net);
MultiTaskNet load_multitask_net(std::istream& is);
MultiTaskNet load_multitask_net(const std::string& path);

/// Shortest-round-trip decimal for CSV cells; fixed 17-significant-digit
/// form for weight files. Both locale-independent.
std::string format_double(double v);
std::string format_double17(double v);

}  // namespace repnet
