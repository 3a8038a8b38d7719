#ifndef RFIM_QA_RFIM_QA_HPP
#define RFIM_QA_RFIM_QA_HPP

#include "rfim_qa/error.hpp"
#include "rfim_qa/model.hpp"
#include "rfim_qa/lanczos.hpp"
#include "rfim_qa/spectral.hpp"
#include "rfim_qa/bethe_qa.hpp"
#include "rfim_qa/bethe_sa.hpp"
#include "rfim_qa/exact_gs.hpp"
#include "rfim_qa/harness.hpp"

#endif  // RFIM_QA_RFIM_QA_HPP
