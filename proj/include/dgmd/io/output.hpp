#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dgmd/core/system.hpp"

namespace dgmd {

/// One extended-XYZ frame: count line, comment line with step, time and box, then
/// "label x y z" per particle in global-id order. labels[s] names species s.
void write_xyz_frame(std::ostream& out, long step, double time, const ParticleSystem& sys,
                     const Box& box, const std::vector<std::string>& labels);

inline constexpr std::string_view diagnostics_header =
    "step,time,kinetic,potential,total,px,py,pz,lx,ly,lz,newton_iters,cg_iters";

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);

/// Reads what write_diagnostics_csv wrote. Throws ParseError on a bad header or row.
std::vector<DiagnosticsRecord> parse_diagnostics_csv(std::string_view text);

} // namespace dgmd
