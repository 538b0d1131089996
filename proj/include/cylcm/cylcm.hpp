#pragma once

#include "cylcm/error.hpp"
#include "cylcm/operator.hpp"
#include "cylcm/spectrum.hpp"
#include "cylcm/xpoly.hpp"
#include "cylcm/hierarchy.hpp"
#include "cylcm/applications.hpp"
#include "cylcm/ode.hpp"
#include "cylcm/rational_poly.hpp"
#include "cylcm/conjugate.hpp"
#include "cylcm/reduced.hpp"
#include "cylcm/wavefield.hpp"
#include "cylcm/io.hpp"
#include "cylcm/config.hpp"
#include "cylcm/acceptance.hpp"
