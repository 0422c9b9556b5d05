#pragma once

#include <string>

#include "frictional/instance_io.hpp"

namespace frictional::testing {

inline LoadedInstance load_fixture(const std::string& name) {
    return load_instance_file(std::string(FIXTURE_DIR) + "/" + name + ".json");
}

}  // namespace frictional::testing
