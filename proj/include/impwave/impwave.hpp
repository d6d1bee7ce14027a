#pragma once

// Geodesics of nonexpanding impulsive waves on (anti-)de Sitter backgrounds:
// 5D hyperboloid embedding, mollified impulse, hybrid closed-form/numeric
// integration, crossing certificates and eps -> 0 limit extraction.

#include "impwave/background.hpp"
#include "impwave/certificate.hpp"
#include "impwave/config.hpp"
#include "impwave/csv.hpp"
#include "impwave/fit.hpp"
#include "impwave/geometry.hpp"
#include "impwave/integrate.hpp"
#include "impwave/jump.hpp"
#include "impwave/limiting.hpp"
#include "impwave/mollifier.hpp"
#include "impwave/profile.hpp"
#include "impwave/quadrature.hpp"
#include "impwave/report.hpp"
#include "impwave/rhs.hpp"
#include "impwave/seed.hpp"
#include "impwave/types.hpp"
