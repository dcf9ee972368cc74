#pragma once

#include "adtmas/adt.hpp"
#include "adtmas/eamas.hpp"

#include <string>

namespace adtmas {

// ADT view: red = attack, green = defence; shape by node kind.
std::string dot_adt(const AdtModel& model);

// Network view: one cluster per local model, sync actions as edge labels.
std::string dot_eamas(const EamasNetwork& net);

}  // namespace adtmas
