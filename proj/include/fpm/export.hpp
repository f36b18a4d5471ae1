#pragma once

#include "fpm/model.hpp"
#include "fpm/solve.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fpm {

// Legacy-VTK unstructured grid: polygon cells, point displacements, cell
// stresses.
void write_vtk(std::ostream& out, const Partition& partition, const FieldSolution& sol);
void write_vtk_file(const std::string& path, const Partition& partition,
                    const FieldSolution& sol);

// Per-point CSV: x1, x2, u1, u2, s11, s22, s12.
void write_field_csv(std::ostream& out, const Partition& partition, const FieldSolution& sol);
void write_field_csv_file(const std::string& path, const Partition& partition,
                          const FieldSolution& sol);

// Crack history CSV: step, segment, endpoints, criterion value.
void write_crack_history_csv(std::ostream& out, const Partition& partition,
                             const CrackState& crack);
void write_crack_history_csv_file(const std::string& path, const Partition& partition,
                                  const CrackState& crack);

// Released segments chained into polylines, one "x y" vertex per line with
// blank lines between polylines (gnuplot-style).
void write_crack_paths(std::ostream& out, const Partition& partition, const CrackState& crack);
void write_crack_paths_file(const std::string& path, const Partition& partition,
                            const CrackState& crack);

} // namespace fpm
