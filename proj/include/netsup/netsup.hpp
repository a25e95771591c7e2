#pragma once

#include "netsup/errors.hpp"
#include "netsup/alphabet.hpp"
#include "netsup/automaton.hpp"
#include "netsup/ops.hpp"
#include "netsup/supervisory.hpp"
#include "netsup/channels.hpp"
#include "netsup/networked.hpp"
#include "netsup/delay_maps.hpp"
#include "netsup/decentralized.hpp"
#include "netsup/simulator.hpp"
#include "netsup/json_io.hpp"
