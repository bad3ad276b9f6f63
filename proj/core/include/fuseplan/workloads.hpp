#pragma once

#include <string>
#include <vector>

namespace fuseplan {

/// Descriptor text for a bundled workload. Available: resnet50,
/// mobilenetv3_small, unet_small, chain4, chain8, chain16. Throws
/// ParseError on an unknown name.
std::string bundled_workload(const std::string& name);

std::vector<std::string> bundled_workload_names();
bool is_bundled_workload(const std::string& name);

}  // namespace fuseplan
