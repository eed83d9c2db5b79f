#ifndef FLSA_ALL_HPP
#define FLSA_ALL_HPP

#include "flsa/corpus.hpp"
#include "flsa/error.hpp"
#include "flsa/eval.hpp"
#include "flsa/experiments.hpp"
#include "flsa/fcm.hpp"
#include "flsa/flsa.hpp"
#include "flsa/io.hpp"
#include "flsa/lda.hpp"
#include "flsa/likelihood.hpp"
#include "flsa/linalg.hpp"
#include "flsa/parallel.hpp"
#include "flsa/random.hpp"
#include "flsa/redundancy.hpp"
#include "flsa/synthetic.hpp"
#include "flsa/weighting.hpp"

#endif
