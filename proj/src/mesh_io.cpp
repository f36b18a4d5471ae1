#include "fpm/mesh_io.hpp"
#include "fpm/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace fpm {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

} // namespace

MeshInput read_mesh_text(std::istream& in) {
    MeshInput mesh;
    std::map<int, int> node_index;
    std::map<std::string, std::vector<std::array<int, 2>>> edgesets;
    std::map<std::string, int> bc_of_set;

    enum class Section { None, Nodes, Elements, EdgeSet };
    Section section = Section::None;
    std::string current_set;

    auto resolve = [&](int ext_id) {
        auto it = node_index.find(ext_id);
        if (it == node_index.end())
            throw MeshError("mesh references unknown node " + std::to_string(ext_id));
        return it->second;
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        const std::string HEAD = upper(head);

        if (HEAD == "NODES") { section = Section::Nodes; continue; }
        if (HEAD == "ELEMENTS") { section = Section::Elements; continue; }
        if (HEAD == "EDGESET") {
            section = Section::EdgeSet;
            ls >> current_set;
            if (current_set.empty())
                throw MeshError("EDGESET needs a name (line " + std::to_string(lineno) + ")");
            continue;
        }
        if (HEAD == "BC") {
            std::string set_name, kind;
            ls >> set_name >> kind;
            const std::string K = upper(kind);
            BoundaryCondition bc;
            if (K == "TRACTION") {
                double t1, t2;
                if (!(ls >> t1 >> t2))
                    throw MeshError("BC traction needs two values (line " + std::to_string(lineno) + ")");
                bc = traction_bc(Vec2(t1, t2));
            } else if (K == "DISPLACEMENT") {
                std::string s1, s2;
                if (!(ls >> s1 >> s2))
                    throw MeshError("BC displacement needs two values (line " + std::to_string(lineno) + ")");
                std::array<bool, 2> mask{s1 != "-", s2 != "-"};
                const double u1 = mask[0] ? std::stod(s1) : 0.0;
                const double u2 = mask[1] ? std::stod(s2) : 0.0;
                bc = displacement_bc([u1, u2](const Vec2&) { return Vec2(u1, u2); }, mask);
            } else {
                throw MeshError("unknown BC kind '" + kind + "' (line " + std::to_string(lineno) + ")");
            }
            bc_of_set[set_name] = static_cast<int>(mesh.bcs.size());
            mesh.bcs.push_back(bc);
            continue;
        }

        switch (section) {
            case Section::Nodes: {
                std::istringstream ns(line);
                int id;
                double x, y;
                if (!(ns >> id >> x >> y))
                    throw MeshError("bad node line " + std::to_string(lineno));
                if (node_index.count(id))
                    throw MeshError("duplicate node id " + std::to_string(id));
                node_index[id] = static_cast<int>(mesh.nodes.size());
                mesh.nodes.emplace_back(x, y);
                break;
            }
            case Section::Elements: {
                std::istringstream es(line);
                int id;
                if (!(es >> id)) throw MeshError("bad element line " + std::to_string(lineno));
                std::vector<int> conn;
                int nid;
                while (es >> nid) conn.push_back(resolve(nid));
                if (conn.size() < 3)
                    throw MeshError("element " + std::to_string(id) + " has fewer than 3 nodes");
                mesh.elements.push_back(conn);
                break;
            }
            case Section::EdgeSet: {
                std::istringstream es(line);
                int na, nb;
                if (!(es >> na >> nb))
                    throw MeshError("bad edge line " + std::to_string(lineno));
                edgesets[current_set].push_back({resolve(na), resolve(nb)});
                break;
            }
            case Section::None:
                throw MeshError("content outside any section (line " + std::to_string(lineno) + ")");
        }
    }

    for (const auto& [set_name, set_edges] : edgesets) {
        auto it = bc_of_set.find(set_name);
        if (it == bc_of_set.end())
            throw MeshError("edge set '" + set_name + "' has no BC line");
        for (const auto& e : set_edges) mesh.tagged_edges.push_back({e, it->second});
    }
    return mesh;
}

MeshInput read_mesh_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file: " + path);
    return read_mesh_text(in);
}

MeshInput read_inp(std::istream& in) {
    MeshInput mesh;
    std::map<int, int> node_index;

    enum class Section { Skip, Nodes, Elements };
    Section section = Section::Skip;

    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (line.size() >= 2 && line[0] == '*' && line[1] == '*') continue;   // comment card
        if (line[0] == '*') {
            const std::string key = upper(line.substr(0, line.find(',')));
            if (key == "*NODE") section = Section::Nodes;
            else if (key == "*ELEMENT") section = Section::Elements;
            else section = Section::Skip;
            continue;
        }
        std::string no_commas = line;
        std::replace(no_commas.begin(), no_commas.end(), ',', ' ');
        std::istringstream ls(no_commas);
        if (section == Section::Nodes) {
            int id;
            double x, y;
            if (!(ls >> id >> x >> y)) throw MeshError("bad *NODE line: " + line);
            if (node_index.count(id)) throw MeshError("duplicate node id " + std::to_string(id));
            node_index[id] = static_cast<int>(mesh.nodes.size());
            mesh.nodes.emplace_back(x, y);
        } else if (section == Section::Elements) {
            int id;
            if (!(ls >> id)) throw MeshError("bad *ELEMENT line: " + line);
            std::vector<int> conn;
            int nid;
            while (ls >> nid) {
                auto it = node_index.find(nid);
                if (it == node_index.end())
                    throw MeshError("element references unknown node " + std::to_string(nid));
                conn.push_back(it->second);
            }
            if (conn.size() < 3) throw MeshError("element " + std::to_string(id) + " too short");
            mesh.elements.push_back(conn);
        }
    }
    if (mesh.nodes.empty() || mesh.elements.empty())
        throw MeshError("no *NODE/*ELEMENT data found");
    return mesh;
}

MeshInput read_inp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open inp file: " + path);
    return read_inp(in);
}

} // namespace fpm
