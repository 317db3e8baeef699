#include "dgmd/io/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "dgmd/core/errors.hpp"
#include "dgmd/io/data_file.hpp"
#include "dgmd/io/generators.hpp"
#include "dgmd/spatial/engine.hpp"
#include "dgmd/spatial/reference_forces.hpp"

namespace dgmd {

namespace {

// Thin checked accessors over a toml table; `where` names the table in error messages.
class Section {
public:
    Section(const toml::table* t, std::string where) : t_(t), where_(std::move(where)) {}

    bool present() const { return t_ != nullptr; }
    const std::string& where() const { return where_; }

    void allow(std::initializer_list<std::string_view> keys) const {
        if (!t_) return;
        const std::set<std::string_view> ok(keys);
        for (const auto& [k, v] : *t_)
            if (!ok.contains(k.str()))
                throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where_);
    }

    bool has(std::string_view key) const { return t_ && t_->contains(key); }

    double number(std::string_view key) const {
        const auto v = node(key).value<double>();
        if (!v) throw ConfigError(where_ + "." + std::string(key) + " must be a number");
        return *v;
    }
    double number(std::string_view key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }
    long integer(std::string_view key) const {
        const auto v = node(key).value<std::int64_t>();
        if (!v || !node(key).is_integer())
            throw ConfigError(where_ + "." + std::string(key) + " must be an integer");
        return static_cast<long>(*v);
    }
    long integer(std::string_view key, long fallback) const {
        return has(key) ? integer(key) : fallback;
    }
    bool boolean(std::string_view key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto v = node(key).value<bool>();
        if (!v) throw ConfigError(where_ + "." + std::string(key) + " must be true or false");
        return *v;
    }
    std::string string(std::string_view key) const {
        const auto v = node(key).value<std::string>();
        if (!v) throw ConfigError(where_ + "." + std::string(key) + " must be a string");
        return *v;
    }
    std::string string(std::string_view key, std::string fallback) const {
        return has(key) ? string(key) : fallback;
    }
    std::vector<double> numbers(std::string_view key) const {
        const auto* arr = node(key).as_array();
        if (!arr) throw ConfigError(where_ + "." + std::string(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : *arr) {
            const auto v = e.value<double>();
            if (!v) throw ConfigError(where_ + "." + std::string(key) + " must be an array of numbers");
            out.push_back(*v);
        }
        return out;
    }
    std::vector<std::string> strings(std::string_view key) const {
        const auto* arr = node(key).as_array();
        if (!arr) throw ConfigError(where_ + "." + std::string(key) + " must be an array of strings");
        std::vector<std::string> out;
        for (const auto& e : *arr) {
            const auto v = e.value<std::string>();
            if (!v) throw ConfigError(where_ + "." + std::string(key) + " must be an array of strings");
            out.push_back(*v);
        }
        return out;
    }
    std::vector<std::vector<long>> index_rows(std::string_view key, std::size_t width) const {
        std::vector<std::vector<long>> rows;
        if (!has(key)) return rows;
        const auto* arr = node(key).as_array();
        if (!arr) throw ConfigError(where_ + "." + std::string(key) + " must be an array of arrays");
        for (const auto& row : *arr) {
            const auto* r = row.as_array();
            if (!r || (r->size() != width && r->size() != width + 1))
                throw ConfigError(where_ + "." + std::string(key) + " rows need " +
                                  std::to_string(width) + " particle ids and an optional type");
            std::vector<long> ids;
            for (const auto& e : *r) {
                const auto v = e.value<std::int64_t>();
                if (!v || !e.is_integer())
                    throw ConfigError(where_ + "." + std::string(key) + " entries must be integers");
                ids.push_back(static_cast<long>(*v));
            }
            rows.push_back(std::move(ids));
        }
        return rows;
    }
    std::array<int, 3> triple(std::string_view key) const {
        const auto v = numbers(key);
        if (v.size() != 3) throw ConfigError(where_ + "." + std::string(key) + " needs 3 entries");
        std::array<int, 3> out{};
        for (int d = 0; d < 3; ++d) {
            out[d] = static_cast<int>(v[d]);
            if (out[d] != v[d]) throw ConfigError(where_ + "." + std::string(key) + " entries must be integers");
        }
        return out;
    }

    Section sub(std::string_view key) const {
        if (!has(key)) return {nullptr, where_.empty() ? std::string(key) : where_ + "." + std::string(key)};
        const auto* t = node(key).as_table();
        if (!t) throw ConfigError("[" + std::string(key) + "] must be a table");
        return {t, where_.empty() ? std::string(key) : where_ + "." + std::string(key)};
    }
    std::vector<Section> sub_array(std::string_view key) const {
        std::vector<Section> out;
        if (!has(key)) return out;
        const auto* arr = node(key).as_array();
        if (!arr) throw ConfigError("[[" + std::string(key) + "]] must be an array of tables");
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const auto* t = (*arr)[i].as_table();
            if (!t) throw ConfigError("[[" + std::string(key) + "]] must be an array of tables");
            out.emplace_back(t, std::string(key) + "[" + std::to_string(i) + "]");
        }
        return out;
    }

private:
    toml::node_view<const toml::node> node(std::string_view key) const {
        if (!has(key)) throw ConfigError("missing " + where_ + "." + std::string(key));
        return toml::node_view<const toml::node>{t_->get(key)};
    }

    const toml::table* t_;
    std::string where_;
};

void load_forcefield(const Section& root, ForceField& ff) {
    for (const auto& s : root.sub_array("species")) {
        s.allow({"name", "mass", "sigma", "epsilon"});
        Species sp{s.string("name"), s.number("mass"), s.number("sigma", 1.0), s.number("epsilon", 0.0)};
        if (!(sp.mass > 0.0)) throw ConfigError(s.where() + ".mass must be positive");
        ff.species.push_back(sp);
    }
    if (ff.species.empty()) throw ConfigError("at least one [[species]] entry is required");

    const auto lj = root.sub("lj");
    lj.allow({"enabled", "switched", "cutoff", "cutoff_sigma", "intermolecular_only"});
    ff.lj_enabled = lj.boolean("enabled", true);
    ff.lj_switched = lj.boolean("switched", false);
    ff.lj_intermolecular_only = lj.boolean("intermolecular_only", true);
    if (lj.has("cutoff") && lj.has("cutoff_sigma"))
        throw ConfigError("give either lj.cutoff or lj.cutoff_sigma, not both");
    if (lj.has("cutoff")) ff.lj_cutoff = lj.number("cutoff");
    if (lj.has("cutoff_sigma")) {
        double sigma_max = 0.0;
        for (const auto& s : ff.species) sigma_max = std::max(sigma_max, s.sigma);
        ff.lj_cutoff = lj.number("cutoff_sigma") * sigma_max;
    }
    if (ff.lj_switched && !std::isfinite(ff.lj_cutoff))
        throw ConfigError("lj.switched needs lj.cutoff or lj.cutoff_sigma");

    for (const auto& b : root.sub_array("bond_types")) {
        b.allow({"k_b", "r0"});
        ff.bond_types.push_back({b.number("k_b"), b.number("r0")});
    }
    for (const auto& a : root.sub_array("angle_types")) {
        a.allow({"k_theta", "theta0_deg"});
        ff.angle_types.push_back(AngleParams::from_degrees(a.number("k_theta"), a.number("theta0_deg")));
    }
    for (const auto& t : root.sub_array("torsion_types")) {
        t.allow({"k_phi", "style", "coefficients"});
        const auto style = t.string("style", t.has("coefficients") ? "polynomial" : "butane");
        if (style == "butane") {
            ff.torsion_types.push_back(TorsionParams::butane(t.number("k_phi")));
        } else if (style == "polynomial") {
            ff.torsion_types.push_back({t.number("k_phi"), t.numbers("coefficients")});
        } else {
            throw ConfigError(t.where() + ".style must be 'butane' or 'polynomial'");
        }
    }
    ff.finalize();
}

Box load_box(const Section& root) {
    const auto b = root.sub("box");
    b.allow({"kind", "length", "lengths", "length_cutoffs"});
    const auto kind = b.string("kind", "free");
    if (kind == "free") return Box::free();
    if (kind != "periodic") throw ConfigError("box.kind must be 'free' or 'periodic'");
    if (b.has("lengths")) {
        const auto L = b.numbers("lengths");
        if (L.size() != 3) throw ConfigError("box.lengths needs 3 entries");
        return Box::periodic(L[0], L[1], L[2]);
    }
    const double L = b.number("length");
    return Box::periodic(L, L, L);
}

std::vector<std::uint32_t> cycle_species(const ForceField& ff, const std::vector<std::string>& names,
                                         std::size_t n) {
    if (names.empty()) throw ConfigError("system.species must name at least one species");
    std::vector<std::uint32_t> ids;
    for (const auto& s : names) ids.push_back(ff.species_index(s));
    std::vector<std::uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = ids[i % ids.size()];
    return out;
}

void load_topology(const Section& root, Experiment& e, Topology derived) {
    const auto t = root.sub("topology");
    t.allow({"derive", "bonds", "angles", "dihedrals", "impropers"});
    if (t.boolean("derive", true)) e.topology = std::move(derived);
    const auto n = static_cast<long>(e.system.size());
    auto id = [&](long v) -> ParticleId {
        if (v < 1 || v > n) throw ConfigError("topology references particle " + std::to_string(v) +
                                              " outside 1.." + std::to_string(n));
        return static_cast<ParticleId>(v - 1);
    };
    auto type = [](const std::vector<long>& row, std::size_t width) {
        return row.size() > width ? static_cast<std::uint32_t>(row[width]) : 0u;
    };
    for (const auto& r : t.index_rows("bonds", 2)) e.topology.bonds.push_back({{id(r[0]), id(r[1])}, type(r, 2)});
    for (const auto& r : t.index_rows("angles", 3))
        e.topology.angles.push_back({{id(r[0]), id(r[1]), id(r[2])}, type(r, 3)});
    for (const auto& r : t.index_rows("dihedrals", 4))
        e.topology.dihedrals.push_back({{id(r[0]), id(r[1]), id(r[2]), id(r[3])}, type(r, 4), false});
    for (const auto& r : t.index_rows("impropers", 4))
        e.topology.dihedrals.push_back({{id(r[0]), id(r[1]), id(r[2]), id(r[3])}, type(r, 4), true});
    e.forcefield.check(e.topology);
}

void load_system(const Section& root, Experiment& e, const std::filesystem::path& base_dir) {
    const auto s = root.sub("system");
    s.allow({"source", "data", "species", "small_cells", "large_cells", "speed", "z_floor", "gap",
             "molecules", "temperature", "bond_length", "bond_angle_deg"});
    const auto source = s.string("source", "data");
    Topology derived;
    if (source == "data") {
        std::filesystem::path file = s.string("data");
        if (file.is_relative()) file = base_dir / file;
        std::ifstream in(file);
        if (!in) throw ConfigError("cannot open data file " + file.string());
        std::stringstream buf;
        buf << in.rdbuf();
        DataFile d;
        try {
            d = parse_data_file(buf.str());
        } catch (const ParseError& err) {
            throw ParseError(file.string() + ": " + err.detail(), err.line());
        }
        e.system = build_system(d, e.forcefield, cycle_species(e.forcefield, s.strings("species"), d.size()));
        derived = d.topology;
    } else if (source == "collision") {
        if (!e.box.is_periodic()) throw ConfigError("the collision setup needs a periodic box");
        const auto sp = e.forcefield.species_index(s.strings("species").at(0));
        const auto& species = e.forcefield.species[sp];
        auto setup = centred_collision(s.triple("small_cells"), s.triple("large_cells"), species.sigma,
                                       species.mass, s.number("speed"), e.box.lengths.x,
                                       s.number("z_floor"), s.number("gap"));
        setup.species = sp;
        e.system = fcc_collision_setup(setup);
    } else if (source == "butane_box") {
        if (!e.box.is_periodic()) throw ConfigError("the butane box needs a periodic box");
        const auto names = s.strings("species");
        if (names.size() != 2) throw ConfigError("system.species for a butane box is [end, middle]");
        ButaneBoxSetup b;
        const auto grid = s.triple("molecules");
        for (int d = 0; d < 3; ++d) b.molecules_per_axis[d] = grid[d];
        b.box_length = e.box.lengths.x;
        b.bond_length = s.number("bond_length", b.bond_length);
        b.bond_angle_deg = s.number("bond_angle_deg", b.bond_angle_deg);
        b.temperature = s.number("temperature", 0.0);
        b.seed = e.seed;
        b.end_species = e.forcefield.species_index(names[0]);
        b.middle_species = e.forcefield.species_index(names[1]);
        const auto g = butane_box(b, e.forcefield.species[b.end_species].mass,
                                  e.forcefield.species[b.middle_species].mass);
        e.system = build_system(g.data, e.forcefield, g.species);
        derived = g.data.topology;
    } else {
        throw ConfigError("system.source must be 'data', 'collision' or 'butane_box'");
    }
    load_topology(root, e, std::move(derived));
}

void load_run(const Section& root, Experiment& e) {
    const auto in = root.sub("integrator");
    in.allow({"method", "angle", "dihedral", "variant", "tau", "t_max"});
    auto& choice = e.run.integrator;
    choice.method = parse_method(in.string("method", "dg"));
    if (in.has("variant")) {
        choice.scheme.angle = choice.scheme.dihedral = parse_dg_variant(in.string("variant"));
    }
    if (in.has("angle")) choice.scheme.angle = parse_dg_variant(in.string("angle"));
    if (in.has("dihedral")) choice.scheme.dihedral = parse_dg_variant(in.string("dihedral"));
    e.t_max = in.number("t_max");
    e.set_tau(in.number("tau"));

    const auto sv = root.sub("solver");
    sv.allow({"newton_tol", "newton_max_iter", "cg_tol", "cg_max_iter", "jacobian", "polish_iter"});
    auto& st = e.run.solver;
    st.newton_tol = sv.number("newton_tol", st.newton_tol);
    st.newton_max_iter = static_cast<int>(sv.integer("newton_max_iter", st.newton_max_iter));
    st.cg_tol = sv.number("cg_tol", st.cg_tol);
    st.cg_max_iter = static_cast<int>(sv.integer("cg_max_iter", st.cg_max_iter));
    st.polish_iter = static_cast<int>(sv.integer("polish_iter", st.polish_iter));
    const auto jac = sv.string("jacobian", "simplified");
    if (jac == "full") st.jacobian_mode = JacobianMode::full;
    else if (jac == "simplified") st.jacobian_mode = JacobianMode::simplified;
    else throw ConfigError("solver.jacobian must be 'full' or 'simplified'");
    st.validate();

    const auto out = root.sub("output");
    out.allow({"prefix", "diagnostics_interval", "trajectory_interval"});
    e.output_prefix = out.string("prefix", e.name);
    e.run.diagnostics_interval = out.integer("diagnostics_interval", 1);
    e.run.trajectory_interval = out.integer("trajectory_interval", 0);
    if (e.run.diagnostics_interval < 1 || e.run.trajectory_interval < 0)
        throw ConfigError("output intervals must be positive (trajectory 0 disables it)");

    const auto par = root.sub("parallel");
    par.allow({"ranks"});
    e.ranks = static_cast<int>(par.integer("ranks", 1));
    if (e.ranks < 1) throw ConfigError("parallel.ranks must be at least 1");

    const auto cv = root.sub("convergence");
    cv.allow({"taus", "t_max", "reference_divisor"});
    if (cv.present()) {
        e.convergence.taus = cv.numbers("taus");
        e.convergence.t_max = cv.number("t_max", e.t_max);
        e.convergence.reference_divisor = static_cast<int>(cv.integer("reference_divisor", 16));
    }
}

} // namespace

std::vector<std::string> Experiment::species_labels() const {
    std::vector<std::string> out;
    for (const auto& s : forcefield.species) out.push_back(s.name);
    return out;
}

void Experiment::set_tau(double tau) {
    if (!(tau != 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be nonzero and finite");
    if (!(t_max >= 0.0)) throw ConfigError("t_max must be non-negative");
    run.tau = tau;
    run.steps = steps_for(t_max, tau);
}

std::unique_ptr<Experiment> parse_experiment(std::string_view toml_text,
                                             const std::filesystem::path& base_dir) {
    toml::table doc;
    try {
        doc = toml::parse(toml_text);
    } catch (const toml::parse_error& err) {
        throw ParseError(std::string(err.description()), static_cast<int>(err.source().begin.line));
    }
    const Section root(&doc, "");
    root.allow({"name", "seed", "system", "box", "species", "lj", "bond_types", "angle_types",
                "torsion_types", "topology", "integrator", "solver", "output", "parallel", "convergence"});

    auto e = std::make_unique<Experiment>();
    e->name = root.string("name", "experiment");
    e->seed = static_cast<std::uint64_t>(root.integer("seed", 1));
    load_forcefield(root, e->forcefield);
    e->box = load_box(root);
    e->box.validate(e->forcefield.cutoff());
    load_system(root, *e, base_dir);
    load_run(root, *e);
    if (e->run.tau <= 0.0) throw ConfigError("integrator.tau must be positive");
    return e;
}

std::unique_ptr<Experiment> load_experiment(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_experiment(buf.str(), file.parent_path());
    } catch (const ParseError& err) {
        throw ParseError(file.string() + ": " + err.detail(), err.line());
    }
}

std::unique_ptr<ForceProvider> make_forces(const Experiment& e, int ranks) {
    if (!e.box.is_periodic()) {
        if (ranks != 1) throw ConfigError("a free-space system runs on a single rank");
        return std::make_unique<ReferenceForces>(e.model());
    }
    return std::make_unique<Engine>(e.model(), ranks);
}

} // namespace dgmd
