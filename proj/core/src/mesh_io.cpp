#include "polyspline/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "polyspline/error.hpp"

namespace polyspline {

namespace {

// Strips comments and blank lines, leaving a single token stream.
std::istringstream tokens(std::istream& in)
{
    std::string line, all;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        all += line;
        all += '\n';
    }
    return std::istringstream(all);
}

} // namespace

PolyMesh read_polyoff(std::istream& in)
{
    auto ts = tokens(in);
    long long nv = -1, nf = -1;
    if (!(ts >> nv >> nf) || nv < 0 || nf < 0)
        throw Error(ErrorCode::Io, "poly-off header must be 'NV NF'");
    std::vector<Vec2> verts(nv);
    for (auto& p : verts)
        if (!(ts >> p.x() >> p.y()))
            throw Error(ErrorCode::Io, "poly-off: truncated vertex list");
    std::vector<std::vector<int>> faces(nf);
    for (auto& loop : faces) {
        int k = 0;
        if (!(ts >> k) || k < 0)
            throw Error(ErrorCode::Io, "poly-off: bad face arity");
        loop.resize(k);
        for (auto& v : loop)
            if (!(ts >> v))
                throw Error(ErrorCode::Io, "poly-off: truncated face list");
    }
    return PolyMesh(std::move(verts), faces);
}

PolyMesh read_polyoff(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open " + path);
    return read_polyoff(in);
}

void write_polyoff(std::ostream& out, const PolyMesh& mesh)
{
    out << mesh.num_vertices() << ' ' << mesh.num_faces() << '\n';
    out << std::setprecision(17);
    for (const auto& p : mesh.vertices())
        out << p.x() << ' ' << p.y() << '\n';
    for (int f = 0; f < mesh.num_faces(); ++f) {
        out << mesh.arity(f);
        for (int v : mesh.face(f))
            out << ' ' << v;
        out << '\n';
    }
}

void write_polyoff(const std::string& path, const PolyMesh& mesh)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path);
    write_polyoff(out, mesh);
    if (!out)
        throw Error(ErrorCode::Io, "write failed for " + path);
}

} // namespace polyspline
