#ifndef ENDCYCLE_ENDCYCLE_HPP
#define ENDCYCLE_ENDCYCLE_HPP

#include "certificate.hpp"
#include "chains.hpp"
#include "cycle_space.hpp"
#include "edge_space.hpp"
#include "error.hpp"
#include "examples.hpp"
#include "graph.hpp"

#endif
