#pragma once

#include "blast/blast_matrix.hpp"
#include "blast/dense.hpp"
#include "blast/embed.hpp"
#include "blast/errors.hpp"
#include "blast/experiments.hpp"
#include "blast/factorize.hpp"
#include "blast/io.hpp"
#include "blast/linalg.hpp"
#include "blast/npy.hpp"
#include "blast/ops.hpp"
