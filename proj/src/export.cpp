#include "fpm/export.hpp"
#include "fpm/errors.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

namespace fpm {

namespace {

// fixed formatting keeps artifacts bit-identical across runs
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    return out;
}

} // namespace

void write_vtk(std::ostream& out, const Partition& partition, const FieldSolution& sol) {
    // cell polygons do not share vertex objects; emit per-cell vertex lists
    std::size_t nverts = 0;
    for (const auto& cell : partition.cells) nverts += cell.size();

    out << "# vtk DataFile Version 3.0\n";
    out << "fpm2d field output\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nverts << " double\n";
    for (const auto& cell : partition.cells)
        for (const auto& v : cell) out << num(v.x()) << " " << num(v.y()) << " 0\n";

    std::size_t ncells = partition.cells.size();
    out << "CELLS " << ncells << " " << (nverts + ncells) << "\n";
    std::size_t base = 0;
    for (const auto& cell : partition.cells) {
        out << cell.size();
        for (std::size_t k = 0; k < cell.size(); ++k) out << " " << (base + k);
        out << "\n";
        base += cell.size();
    }
    out << "CELL_TYPES " << ncells << "\n";
    for (std::size_t c = 0; c < ncells; ++c) out << "7\n";   // VTK_POLYGON

    out << "CELL_DATA " << ncells << "\n";
    out << "VECTORS displacement double\n";
    for (int p = 0; p < partition.n_points(); ++p)
        out << num(sol.q(2 * p)) << " " << num(sol.q(2 * p + 1)) << " 0\n";
    for (const char* name : {"s11", "s22", "s12"}) {
        const int comp = name[1] == '1' && name[2] == '1' ? 0 : (name[1] == '2' ? 1 : 2);
        out << "SCALARS " << name << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (int p = 0; p < partition.n_points(); ++p)
            out << num(sol.stress[static_cast<std::size_t>(p)](comp)) << "\n";
    }
}

void write_vtk_file(const std::string& path, const Partition& partition,
                    const FieldSolution& sol) {
    auto out = open_out(path);
    write_vtk(out, partition, sol);
}

void write_field_csv(std::ostream& out, const Partition& partition, const FieldSolution& sol) {
    out << "x1,x2,u1,u2,s11,s22,s12\n";
    for (int p = 0; p < partition.n_points(); ++p) {
        const Vec2& x = partition.cloud.pts[static_cast<std::size_t>(p)];
        const auto& s = sol.stress[static_cast<std::size_t>(p)];
        out << num(x.x()) << "," << num(x.y()) << "," << num(sol.q(2 * p)) << ","
            << num(sol.q(2 * p + 1)) << "," << num(s(0)) << "," << num(s(1)) << ","
            << num(s(2)) << "\n";
    }
}

void write_field_csv_file(const std::string& path, const Partition& partition,
                          const FieldSolution& sol) {
    auto out = open_out(path);
    write_field_csv(out, partition, sol);
}

void write_crack_history_csv(std::ostream& out, const Partition& partition,
                             const CrackState& crack) {
    out << "step,segment,ax,ay,bx,by,value\n";
    for (const auto& ev : crack.history) {
        const auto& seg = partition.internal[static_cast<std::size_t>(ev.segment)];
        out << ev.step << "," << ev.segment << "," << num(seg.a.x()) << "," << num(seg.a.y())
            << "," << num(seg.b.x()) << "," << num(seg.b.y()) << "," << num(ev.value) << "\n";
    }
}

void write_crack_history_csv_file(const std::string& path, const Partition& partition,
                                  const CrackState& crack) {
    auto out = open_out(path);
    write_crack_history_csv(out, partition, crack);
}

void write_crack_paths(std::ostream& out, const Partition& partition, const CrackState& crack) {
    // chain released segments through shared vertices
    std::map<int, std::vector<int>> vert_segs;
    std::set<int> todo;
    for (int s = 0; s < static_cast<int>(partition.internal.size()); ++s) {
        if (!crack.released[static_cast<std::size_t>(s)]) continue;
        todo.insert(s);
        vert_segs[partition.internal[static_cast<std::size_t>(s)].va].push_back(s);
        vert_segs[partition.internal[static_cast<std::size_t>(s)].vb].push_back(s);
    }
    while (!todo.empty()) {
        int s = *todo.begin();
        // walk to one end of the chain
        int start_vert = partition.internal[static_cast<std::size_t>(s)].va;
        {
            std::set<int> seen;
            int v = start_vert, cur = s;
            while (true) {
                seen.insert(cur);
                int next = -1;
                for (int cand : vert_segs[v])
                    if (!seen.count(cand) && todo.count(cand)) { next = cand; break; }
                if (next < 0) break;
                const auto& seg = partition.internal[static_cast<std::size_t>(next)];
                v = seg.va == v ? seg.vb : seg.va;
                cur = next;
            }
            start_vert = v;
            s = cur;
        }
        // emit the polyline from that end
        int v = start_vert;
        out << num(partition.vertices[static_cast<std::size_t>(v)].x()) << " "
            << num(partition.vertices[static_cast<std::size_t>(v)].y()) << "\n";
        int cur = s;
        while (true) {
            const auto& seg = partition.internal[static_cast<std::size_t>(cur)];
            v = seg.va == v ? seg.vb : seg.va;
            out << num(partition.vertices[static_cast<std::size_t>(v)].x()) << " "
                << num(partition.vertices[static_cast<std::size_t>(v)].y()) << "\n";
            todo.erase(cur);
            int next = -1;
            for (int cand : vert_segs[v])
                if (todo.count(cand)) { next = cand; break; }
            if (next < 0) break;
            cur = next;
        }
        out << "\n";
    }
}

void write_crack_paths_file(const std::string& path, const Partition& partition,
                            const CrackState& crack) {
    auto out = open_out(path);
    write_crack_paths(out, partition, crack);
}

} // namespace fpm
