#pragma once

// Umbrella header.
#include "linalg.hpp"
#include "jet.hpp"
#include "algebra.hpp"
#include "check.hpp"
#include "geometry.hpp"
#include "fluctuations.hpp"
#include "gauge.hpp"
#include "report.hpp"
