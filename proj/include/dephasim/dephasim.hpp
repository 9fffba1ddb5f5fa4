#pragma once

#include "dephasim/errors.hpp"
#include "dephasim/linalg.hpp"
#include "dephasim/fock.hpp"
#include "dephasim/dephasing.hpp"
#include "dephasim/entanglement.hpp"
#include "dephasim/qubit_boson.hpp"
#include "dephasim/config.hpp"
#include "dephasim/sweep.hpp"
