#pragma once

#include "bsdlab/poly.hpp"

#include <string>
#include <vector>

namespace bsd {

struct CatalogEntry {
    std::string id;
    std::string description;
    PolyMatrixMap map;
    std::vector<int> expected_index;  // in level order, half levels included
    bool decomposable = false;        // expected to split as iota o (F1 x F2)
};

// closed-form proper maps with known index sequences
std::vector<CatalogEntry> catalog();
const CatalogEntry& catalog_entry(const std::string& id);

// I(2,2) -> I(3,3), Z -> diag(Z, c z11)
PolyMatrixMap diagonal_map(double c = 0.3);
// Z -> [Z; 0]
PolyMatrixMap block_map(const DomainSpec& source, int extra_rows);
// inclusion of a type III domain into the type I ball of the same size
PolyMatrixMap inclusion_map(int n);
// Z + c Z Z^T on I(3,3): not proper, kept out of the catalog
PolyMatrixMap corrupted_identity(double c = 0.5);

}  // namespace bsd
