#pragma once

#include "specboot/bootstrap.hpp"
#include "specboot/errors.hpp"
#include "specboot/gamma.hpp"
#include "specboot/ingest.hpp"
#include "specboot/intervals.hpp"
#include "specboot/krylov.hpp"
#include "specboot/linalg.hpp"
#include "specboot/metrics.hpp"
#include "specboot/models.hpp"
#include "specboot/parallel.hpp"
#include "specboot/streams.hpp"
