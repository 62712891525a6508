#pragma once

#include "moltunnel/bound_states.hpp"
#include "moltunnel/config.hpp"
#include "moltunnel/coupled.hpp"
#include "moltunnel/errors.hpp"
#include "moltunnel/fit.hpp"
#include "moltunnel/io.hpp"
#include "moltunnel/potentials.hpp"
#include "moltunnel/resonance.hpp"
#include "moltunnel/rigid.hpp"
#include "moltunnel/scatter1d.hpp"
#include "moltunnel/thermal.hpp"
#include "moltunnel/units.hpp"
#include "moltunnel/version.hpp"
