#include "dgmd/io/output.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "dgmd/core/errors.hpp"
#include "dgmd/io/format.hpp"

namespace dgmd {

void write_xyz_frame(std::ostream& out, long step, double time, const ParticleSystem& sys,
                     const Box& box, const std::vector<std::string>& labels) {
    out << sys.size() << '\n';
    if (box.is_periodic()) {
        const auto& L = box.lengths;
        out << "Lattice=\"" << format_double(L.x) << " 0 0 0 " << format_double(L.y) << " 0 0 0 "
            << format_double(L.z) << "\" pbc=\"T T T\" ";
    } else {
        out << "pbc=\"F F F\" ";
    }
    out << "Properties=species:S:1:pos:R:3 Time=" << format_double(time) << " Step=" << step << '\n';

    std::vector<std::size_t> order(sys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sys.global_id[a] < sys.global_id[b]; });
    for (const auto i : order) {
        const auto s = sys.species[i];
        out << (s < labels.size() ? labels[s] : "X" + std::to_string(s));
        const auto& q = sys.q[i];
        out << ' ' << format_double(q.x) << ' ' << format_double(q.y) << ' ' << format_double(q.z)
            << '\n';
    }
    if (!out) throw IoError("failed to write trajectory frame");
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
    out << diagnostics_header << '\n';
    for (const auto& r : records) {
        out << r.step << ',' << format_double(r.time) << ',' << format_double(r.kinetic) << ','
            << format_double(r.potential) << ',' << format_double(r.total_energy);
        for (const auto& v : {r.linear_momentum, r.angular_momentum})
            out << ',' << format_double(v.x) << ',' << format_double(v.y) << ','
                << format_double(v.z);
        out << ',' << r.newton_iterations << ',' << r.cg_iterations_total << '\n';
    }
    if (!out) throw IoError("failed to write diagnostics");
}

std::vector<DiagnosticsRecord> parse_diagnostics_csv(std::string_view text) {
    std::vector<DiagnosticsRecord> records;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1) {
            if (line != diagnostics_header) throw ParseError("unexpected diagnostics header", 1);
            continue;
        }
        if (line.empty()) continue;

        std::vector<std::string_view> f;
        std::size_t a = 0;
        for (;;) {
            const auto comma = line.find(',', a);
            f.push_back(line.substr(a, comma == std::string_view::npos ? comma : comma - a));
            if (comma == std::string_view::npos) break;
            a = comma + 1;
        }
        if (f.size() != 13) throw ParseError("expected 13 fields", line_no);

        DiagnosticsRecord r;
        double x[11];
        bool ok = parse_number(f[0], r.step);
        for (int k = 1; k < 11; ++k) ok = ok && parse_number(f[k], x[k]);
        ok = ok && parse_number(f[11], r.newton_iterations) &&
             parse_number(f[12], r.cg_iterations_total);
        if (!ok) throw ParseError("malformed diagnostics row", line_no);
        r.time = x[1];
        r.kinetic = x[2];
        r.potential = x[3];
        r.total_energy = x[4];
        r.linear_momentum = {x[5], x[6], x[7]};
        r.angular_momentum = {x[8], x[9], x[10]};
        records.push_back(r);
    }
    if (line_no == 0) throw ParseError("empty diagnostics file", 0);
    return records;
}

} // namespace dgmd
