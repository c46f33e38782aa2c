#pragma once

#include <string>

#include "clh/instance.hpp"

namespace clh {

// CLH-JSON v1. load validates the instance before returning; save writes
// exactly the fields load reads, so load(save(x)) == x.
Instance load_instance(const std::string& path);
Instance instance_from_json_text(const std::string& text);
void save_instance(const Instance& inst, const std::string& path);
std::string instance_to_json_text(const Instance& inst);

}  // namespace clh
