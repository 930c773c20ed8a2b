#pragma once

#include <cstdint>
#include <string>

#include "glt/csr.hpp"

namespace glt {

// Split policy for source distributions that carry no split of their own:
// scanning nodes in file order, the first train_per_class nodes of each class
// become train, the next val_size unassigned nodes val, then test_size test.
struct ConvertOptions {
    idx train_per_class = 20;
    idx val_size = 500;
    idx test_size = 1000;
};

struct ConvertStats {
    idx num_nodes = 0;
    idx num_edges = 0;  // unique undirected, self-loops dropped
    idx num_classes = 0;
    idx num_features = 0;
    idx skipped_unknown = 0;  // cite lines naming absent papers
    idx skipped_self = 0;
    idx skipped_duplicate = 0;  // repeated or reciprocal cite lines
};

// Ingests a LINQS-style citation dataset (<name>.content + <name>.cites in
// in_dir) and writes the TSV dataset layout into out_dir. Node ids follow
// content-file order; class ids follow sorted label strings. Deterministic,
// so re-running is byte-identical.
ConvertStats convert_linqs(const std::string& in_dir, const std::string& out_dir,
                           const ConvertOptions& opt = {});

}  // namespace glt
