#include "dgmd/io/data_file.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>

#include "dgmd/core/errors.hpp"
#include "dgmd/io/format.hpp"

namespace dgmd {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const auto start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

struct Row {
    long id = 0;
    std::uint64_t molecule = 0;
    Vec3 v{};
    int line = 0;
};

long parse_id(std::string_view token, int line) {
    long id = 0;
    if (!parse_number(token, id) || id < 1)
        throw ParseError("particle id must be a positive integer, got '" + std::string(token) + "'",
                         line);
    return id;
}

double parse_coordinate(std::string_view token, int line) {
    double x = 0.0;
    if (!parse_number(token, x))
        throw ParseError("expected a number, got '" + std::string(token) + "'", line);
    return x;
}

} // namespace

Topology derive_topology(const std::vector<MoleculeBlock>& blocks) {
    Topology t;
    for (const auto& b : blocks) {
        if (b.molecule == 0) continue;
        for (std::size_t k = 0; k + 1 < b.count; ++k)
            t.bonds.push_back({{b.first + k, b.first + k + 1}, 0});
        for (std::size_t k = 0; k + 2 < b.count; ++k)
            t.angles.push_back({{b.first + k, b.first + k + 1, b.first + k + 2}, 0});
        for (std::size_t k = 0; k + 3 < b.count; ++k)
            t.dihedrals.push_back({{b.first + k, b.first + k + 1, b.first + k + 2, b.first + k + 3}, 0, false});
    }
    return t;
}

DataFile parse_data_file(std::string_view text) {
    enum class Section { none, positions, velocities };
    Section section = Section::none;
    bool seen_positions = false, seen_velocities = false;
    std::optional<std::size_t> position_columns;
    std::vector<Row> positions, velocities;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto tok = split_ws(line);
        if (tok.empty()) continue;

        if (tok.size() == 1 && tok[0] == "Positions") {
            if (seen_positions) throw ParseError("duplicate Positions section", line_no);
            seen_positions = true;
            section = Section::positions;
            continue;
        }
        if (tok.size() == 1 && tok[0] == "Velocities") {
            if (seen_velocities) throw ParseError("duplicate Velocities section", line_no);
            seen_velocities = true;
            section = Section::velocities;
            continue;
        }
        if (section == Section::none)
            throw ParseError("data row before any section header", line_no);

        Row row;
        row.line = line_no;
        if (section == Section::positions) {
            if (tok.size() != 4 && tok.size() != 5)
                throw ParseError("position rows need 4 or 5 columns, got " + std::to_string(tok.size()),
                                 line_no);
            if (!position_columns) position_columns = tok.size();
            if (*position_columns != tok.size())
                throw ParseError("ragged row: expected " + std::to_string(*position_columns) +
                                     " columns, got " + std::to_string(tok.size()),
                                 line_no);
            row.id = parse_id(tok[0], line_no);
            std::size_t c = 1;
            if (tok.size() == 5) {
                long mol = 0;
                if (!parse_number(tok[1], mol) || mol < 0)
                    throw ParseError("molecule id must be a non-negative integer", line_no);
                row.molecule = static_cast<std::uint64_t>(mol);
                c = 2;
            }
            row.v = {parse_coordinate(tok[c], line_no), parse_coordinate(tok[c + 1], line_no),
                     parse_coordinate(tok[c + 2], line_no)};
            positions.push_back(row);
        } else {
            if (tok.size() != 4)
                throw ParseError("velocity rows need 4 columns (id vx vy vz), got " +
                                     std::to_string(tok.size()),
                                 line_no);
            row.id = parse_id(tok[0], line_no);
            row.v = {parse_coordinate(tok[1], line_no), parse_coordinate(tok[2], line_no),
                     parse_coordinate(tok[3], line_no)};
            velocities.push_back(row);
        }
    }
    if (!seen_positions) throw ParseError("missing Positions section", 0);

    const std::size_t n = positions.size();
    DataFile d;
    d.has_molecule_column = position_columns.value_or(4) == 5;
    d.has_velocities = seen_velocities;
    d.positions.assign(n, Vec3{});
    d.velocities.assign(n, Vec3{});
    d.molecule.assign(n, 0);
    std::vector<int> line_of(n, 0);
    for (const auto& r : positions) {
        if (static_cast<std::size_t>(r.id) > n)
            throw ParseError("particle ids must be dense from 1; id " + std::to_string(r.id) +
                                 " exceeds the particle count " + std::to_string(n),
                             r.line);
        const auto i = static_cast<std::size_t>(r.id - 1);
        if (line_of[i] != 0) throw ParseError("duplicate particle id " + std::to_string(r.id), r.line);
        line_of[i] = r.line;
        d.positions[i] = r.v;
        d.molecule[i] = r.molecule;
    }
    std::vector<bool> has_velocity(n, false);
    for (const auto& r : velocities) {
        if (static_cast<std::size_t>(r.id) > n)
            throw ParseError("velocity for unknown particle id " + std::to_string(r.id), r.line);
        const auto i = static_cast<std::size_t>(r.id - 1);
        if (has_velocity[i])
            throw ParseError("duplicate velocity for particle id " + std::to_string(r.id), r.line);
        has_velocity[i] = true;
        d.velocities[i] = r.v;
    }

    std::unordered_set<std::uint64_t> closed;
    for (std::size_t i = 0; i < n; ++i) {
        const auto m = d.molecule[i];
        if (!d.blocks.empty() && d.blocks.back().molecule == m) {
            ++d.blocks.back().count;
            continue;
        }
        if (m != 0 && closed.contains(m))
            throw ParseError("molecule " + std::to_string(m) + " is split into non-contiguous blocks",
                             line_of[i]);
        if (!d.blocks.empty()) closed.insert(d.blocks.back().molecule);
        d.blocks.push_back({m, i, 1});
    }
    d.topology = derive_topology(d.blocks);
    return d;
}

void write_data_file(std::ostream& out, const DataFile& data) {
    out << "Positions\n\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << i + 1;
        if (data.has_molecule_column) out << ' ' << data.molecule[i];
        const auto& q = data.positions[i];
        out << ' ' << format_double(q.x) << ' ' << format_double(q.y) << ' ' << format_double(q.z)
            << '\n';
    }
    if (data.has_velocities) {
        out << "\nVelocities\n\n";
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& v = data.velocities[i];
            out << i + 1 << ' ' << format_double(v.x) << ' ' << format_double(v.y) << ' '
                << format_double(v.z) << '\n';
        }
    }
    if (!out) throw IoError("failed to write data file");
}

ParticleSystem build_system(const DataFile& data, const ForceField& ff,
                            const std::vector<std::uint32_t>& species) {
    if (species.size() != data.size())
        throw ConfigError("species list has " + std::to_string(species.size()) +
                          " entries for " + std::to_string(data.size()) + " particles");
    ParticleSystem sys;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (species[i] >= ff.species.size())
            throw ConfigError("particle " + std::to_string(i + 1) + " has an unknown species");
        const double m = ff.species[species[i]].mass;
        sys.add(data.positions[i], m * data.velocities[i], m, species[i], data.molecule[i]);
    }
    sys.validate();
    return sys;
}

} // namespace dgmd
