#pragma once

#include "ttc/errors.hpp"
#include "ttc/floquet.hpp"
#include "ttc/meanfield.hpp"
#include "ttc/model.hpp"
#include "ttc/parallel.hpp"
#include "ttc/spectral.hpp"
#include "ttc/spin_algebra.hpp"
#include "ttc/survival.hpp"
#include "ttc/version.hpp"
