#pragma once

namespace lndf {

// Classic marching-cubes lookup tables (Lorensen/Bourke numbering):
// corners 0-3 on the z face counterclockwise from (0,0,0), 4-7 above them;
// edge i of a case connects the corner pair listed in extract.cpp.
extern const int kMcEdgeTable[256];
extern const int kMcTriTable[256][16];

} // namespace lndf
