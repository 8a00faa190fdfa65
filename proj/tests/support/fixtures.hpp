#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace normcase::testing {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture(const std::string& name) {
    return read_file(std::string(NORMCASE_FIXTURES) + "/" + name);
}

} // namespace normcase::testing
