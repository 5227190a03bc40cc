#pragma once

#include "moransar/autocorr.hpp"
#include "moransar/bounds.hpp"
#include "moransar/eigen.hpp"
#include "moransar/error.hpp"
#include "moransar/inference.hpp"
#include "moransar/io.hpp"
#include "moransar/matrix.hpp"
#include "moransar/ols.hpp"
#include "moransar/report.hpp"
#include "moransar/sar.hpp"
#include "moransar/significance.hpp"
#include "moransar/spatial_data.hpp"
#include "moransar/svg.hpp"
#include "moransar/synthetic.hpp"
#include "moransar/tolerance.hpp"
#include "moransar/verify.hpp"
#include "moransar/version.hpp"
