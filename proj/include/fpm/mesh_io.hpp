#pragma once

#include "fpm/geometry.hpp"

#include <iosfwd>
#include <string>

namespace fpm {

// Line-oriented mesh format:
//
//   # comment
//   NODES
//   <id> <x> <y>
//   ELEMENTS
//   <id> <n1> <n2> <n3> [<n4> ...]
//   EDGESET <name>
//   <nodeA> <nodeB>
//   BC <name> traction <t1> <t2>
//   BC <name> displacement <u1|-> <u2|->     ("-" leaves a component free)
//
// Node and element ids are arbitrary but unique; edge sets reference nodes.
MeshInput read_mesh_text(std::istream& in);
MeshInput read_mesh_text_file(const std::string& path);

// *NODE / *ELEMENT cards of the classic FE .inp format (geometry only; any
// other keyword block is skipped).
MeshInput read_inp(std::istream& in);
MeshInput read_inp_file(const std::string& path);

} // namespace fpm
