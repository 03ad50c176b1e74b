#pragma once

#include "progmetric/code_blocks.hpp"
#include "progmetric/corpus.hpp"
#include "progmetric/distance_matrix.hpp"
#include "progmetric/distmat_engine.hpp"
#include "progmetric/fixtures.hpp"
#include "progmetric/harness.hpp"
#include "progmetric/io.hpp"
#include "progmetric/mds.hpp"
#include "progmetric/parse.hpp"
#include "progmetric/pipeline.hpp"
#include "progmetric/spatial_stats.hpp"
#include "progmetric/syntax_tree.hpp"
#include "progmetric/tda.hpp"
#include "progmetric/ted_oracle.hpp"
#include "progmetric/tree_edit.hpp"
#include "progmetric/union_find.hpp"
#include "progmetric/version.hpp"
