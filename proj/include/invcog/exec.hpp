#pragma once

namespace invcog {

// Monte-Carlo kernels come in two flavours. `serial` is the reference loop;
// `parallel` distributes replicates with OpenMP. Both consume identical
// per-replicate RNG substreams and reduce in index order, so results match
// bit for bit.
enum class Exec { serial, parallel };

}  // namespace invcog
