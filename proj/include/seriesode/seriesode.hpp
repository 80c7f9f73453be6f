#pragma once

#include "seriesode/mpcore.hpp"
#include "seriesode/apriori.hpp"
#include "seriesode/frobenius.hpp"
#include "seriesode/accuracy.hpp"
#include "seriesode/continuation.hpp"
#include "seriesode/spectra.hpp"
#include "seriesode/labs.hpp"
#include "seriesode/io.hpp"
