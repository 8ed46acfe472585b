#pragma once

#include <string>

#ifndef SPINSIM_DATA_DIR
#define SPINSIM_DATA_DIR "data"
#endif

inline std::string data_path(const std::string& name) { return std::string(SPINSIM_DATA_DIR) + "/" + name; }
