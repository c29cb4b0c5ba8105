#pragma once

#include "tmodel/catalog.hpp"
#include "tmodel/core.hpp"
#include "tmodel/document.hpp"
#include "tmodel/reporting.hpp"
#include "tmodel/scoring.hpp"
