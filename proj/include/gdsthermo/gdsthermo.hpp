#pragma once

#include "symplectic.hpp"
#include "gds.hpp"
#include "moments.hpp"
#include "thermal.hpp"
#include "qdbc.hpp"
#include "fock.hpp"
