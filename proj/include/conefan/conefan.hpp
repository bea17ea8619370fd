// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_CONEFAN_HPP
#define CONEFAN_CONEFAN_HPP

#include "conefan/common.hpp"
#include "conefan/nnls.hpp"
#include "conefan/cone.hpp"
#include "conefan/fan.hpp"
#include "conefan/tube.hpp"
#include "conefan/inclusions.hpp"
#include "conefan/embeddings.hpp"
#include "conefan/networks.hpp"
#include "conefan/io.hpp"

#endif  // CONEFAN_CONEFAN_HPP
