#pragma once

#include "spk/dipole.hpp"
#include "spk/eigen.hpp"
#include "spk/energy.hpp"
#include "spk/error.hpp"
#include "spk/graph.hpp"
#include "spk/greens.hpp"
#include "spk/kernel.hpp"
#include "spk/linalg.hpp"
#include "spk/matrix.hpp"
#include "spk/table.hpp"
#include "spk/truncation.hpp"
