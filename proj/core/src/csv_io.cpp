#include "levyfilter/csv_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "levyfilter/errors.hpp"

namespace levyfilter::csv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) {
        parts.push_back(cur);
    }
    if (!line.empty() && line.back() == sep) parts.emplace_back();
    return parts;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw DomainError("not a number in CSV: '" + s + "'");
    }
    return v;
}

void write_row(std::ostream& out, const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out << ',';
        out << format_double(values[k]);
    }
    out << '\n';
}

void write_density_rows(std::ostream& out, const Grid1D& grid, const std::vector<double>& times,
                        const std::vector<const DensityField*>& fields,
                        const std::vector<double>* log_norm) {
    out << 't';
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << ',' << format_double(grid.node(i));
    }
    if (log_norm) out << ",log_norm";
    out << '\n';
    for (std::size_t s = 0; s < times.size(); ++s) {
        out << format_double(times[s]);
        for (double v : fields[s]->values()) {
            out << ',' << format_double(v);
        }
        if (log_norm) out << ',' << format_double((*log_norm)[s]);
        out << '\n';
    }
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    throw DomainError("CSV column '" + name + "' not found");
}

void write_metadata(std::ostream& out, const Metadata& meta) {
    out << "# levyfilter";
    for (const auto& [k, v] : meta) {
        out << ' ' << k << '=' << v;
    }
    out << '\n';
}

Table read_table(std::istream& in) {
    Table table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream words(line.substr(1));
            std::string word;
            while (words >> word) {
                const auto eq = word.find('=');
                if (eq != std::string::npos) {
                    table.metadata[word.substr(0, eq)] = word.substr(eq + 1);
                }
            }
            continue;
        }
        if (!have_header) {
            table.header = split(line, ',');
            have_header = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != table.header.size()) {
            throw DomainError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(table.header.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_double(c));
        table.rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw DomainError("CSV input has no header line");
    }
    return table;
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    return read_table(in);
}

void write_density(std::ostream& out, const DensityEvolution& evo, const Metadata& meta) {
    write_metadata(out, meta);
    std::vector<const DensityField*> fields;
    for (const auto& f : evo.snapshots()) fields.push_back(&f);
    write_density_rows(out, evo.grid(), evo.times(), fields,
                       evo.has_log_norm() ? &evo.log_norm() : nullptr);
}

void write_density(const std::filesystem::path& path, const DensityEvolution& evo,
                   const Metadata& meta) {
    auto out = open_out(path);
    write_density(out, evo, meta);
}

void write_prior_density(const std::filesystem::path& path, const DensityEvolution& evo,
                         const Metadata& meta) {
    auto out = open_out(path);
    write_metadata(out, meta);
    std::vector<double> times;
    std::vector<const DensityField*> fields;
    for (const auto& u : evo.updates()) {
        times.push_back(u.time);
        fields.push_back(&u.prior);
    }
    write_density_rows(out, evo.grid(), times, fields, nullptr);
}

void write_updates(const std::filesystem::path& path, const DensityEvolution& evo,
                   const Metadata& meta) {
    auto out = open_out(path);
    write_metadata(out, meta);
    out << "t,phase,row,log_evidence\n";
    for (std::size_t k = 0; k < evo.updates().size(); ++k) {
        const auto& u = evo.updates()[k];
        out << format_double(u.time) << ",pre," << k << ',' << format_double(u.log_evidence) << '\n';
        out << format_double(u.time) << ",post," << u.snapshot_index << ','
            << format_double(u.log_evidence) << '\n';
    }
}

DensityEvolution read_density(const std::filesystem::path& path) {
    const Table t = read_table(path);
    if (t.header.empty() || t.header.front() != "t") {
        throw DomainError("density file must start with a 't' column: " + path.string());
    }
    const bool has_log_norm = t.header.back() == "log_norm";
    const std::size_t n = t.header.size() - 1 - (has_log_norm ? 1 : 0);
    std::vector<double> nodes;
    for (std::size_t k = 1; k <= n; ++k) nodes.push_back(parse_double(t.header[k]));
    if (nodes.size() < 5) {
        throw DomainError("density file has fewer than 5 grid nodes");
    }
    const Grid1D grid(nodes.front(), nodes.back(), nodes.size());
    std::size_t stride = 1;
    if (auto it = t.metadata.find("store_stride"); it != t.metadata.end()) {
        stride = static_cast<std::size_t>(std::stoul(it->second));
    }
    DensityEvolution evo(grid, stride);
    for (const auto& row : t.rows) {
        std::vector<double> v(row.begin() + 1, row.begin() + 1 + static_cast<std::ptrdiff_t>(n));
        std::optional<double> ln;
        if (has_log_norm) ln = row.back();
        evo.push(row.front(), DensityField(grid, std::move(v)), ln);
    }
    return evo;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                      const Metadata& meta) {
    auto out = open_out(path);
    write_metadata(out, meta);
    out << "t,x\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        write_row(out, {traj.times[k], traj.states[k]});
    }
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    const Table t = read_table(path);
    Trajectory traj;
    const auto ct = t.column("t"), cx = t.column("x");
    for (const auto& row : t.rows) {
        traj.times.push_back(row[ct]);
        traj.states.push_back(row[cx]);
    }
    if (auto it = t.metadata.find("dt"); it != t.metadata.end()) {
        traj.dt = parse_double(it->second);
    } else if (traj.size() > 1) {
        traj.dt = traj.times[1] - traj.times[0];
    }
    if (auto it = t.metadata.find("seed"); it != t.metadata.end()) {
        traj.seed = std::stoull(it->second);
    }
    if (auto it = t.metadata.find("drift"); it != t.metadata.end()) {
        traj.drift_name = it->second;
    }
    if (auto it = t.metadata.find("truncated"); it != t.metadata.end()) {
        traj.truncated = it->second == "true";
    }
    return traj;
}

void write_discrete_observations(const std::filesystem::path& path, const DiscreteObservations& obs,
                                 const Metadata& meta) {
    auto out = open_out(path);
    write_metadata(out, meta);
    out << "t,y,R\n";
    for (std::size_t k = 0; k < obs.size(); ++k) {
        write_row(out, {obs.times[k], obs.values[k], obs.variances[k]});
    }
}

DiscreteObservations read_discrete_observations(const std::filesystem::path& path,
                                                const ObservationFn& h) {
    const Table t = read_table(path);
    DiscreteObservations obs;
    obs.h = h;
    const auto ct = t.column("t"), cy = t.column("y"), cr = t.column("R");
    for (const auto& row : t.rows) {
        obs.times.push_back(row[ct]);
        obs.values.push_back(row[cy]);
        obs.variances.push_back(row[cr]);
    }
    obs.validate();
    return obs;
}

void write_observation_path(const std::filesystem::path& path, const ContinuousObservationPath& obs,
                            const Metadata& meta) {
    Metadata full = meta;
    const bool has_scale = std::any_of(full.begin(), full.end(),
                                       [](const auto& kv) { return kv.first == "obs_noise_scale"; });
    if (!has_scale) full.emplace_back("obs_noise_scale", format_double(obs.obs_noise_scale));
    auto out = open_out(path);
    write_metadata(out, full);
    out << "t,Y\n";
    for (std::size_t k = 0; k < obs.size(); ++k) {
        write_row(out, {obs.times[k], obs.y_values[k]});
    }
}

ContinuousObservationPath read_observation_path(const std::filesystem::path& path,
                                                const ObservationFn& h, double obs_noise_scale) {
    const Table t = read_table(path);
    ContinuousObservationPath obs;
    obs.h = h;
    obs.obs_noise_scale = obs_noise_scale;
    if (auto it = t.metadata.find("obs_noise_scale"); it != t.metadata.end()) {
        obs.obs_noise_scale = parse_double(it->second);
    }
    const auto ct = t.column("t"), cy = t.column("Y");
    for (const auto& row : t.rows) {
        obs.times.push_back(row[ct]);
        obs.y_values.push_back(row[cy]);
    }
    obs.validate();
    return obs;
}

void write_orbit(const std::filesystem::path& path, const MostProbableOrbit& orbit,
                 const Metadata& meta) {
    auto out = open_out(path);
    write_metadata(out, meta);
    out << "t,x_star,peak_value\n";
    for (std::size_t k = 0; k < orbit.size(); ++k) {
        write_row(out, {orbit.times[k], orbit.x_star[k], orbit.peak_value[k]});
    }
}

MostProbableOrbit read_orbit(const std::filesystem::path& path) {
    const Table t = read_table(path);
    MostProbableOrbit orbit;
    const auto ct = t.column("t"), cx = t.column("x_star"), cp = t.column("peak_value");
    for (const auto& row : t.rows) {
        orbit.times.push_back(row[ct]);
        orbit.x_star.push_back(row[cx]);
        orbit.peak_value.push_back(row[cp]);
    }
    return orbit;
}

void write_events(const std::filesystem::path& path, const std::vector<TransitionEvent>& events,
                  const Metadata& meta) {
    auto out = open_out(path);
    write_metadata(out, meta);
    out << "t_cross,from,to,dwell_before\n";
    for (const auto& e : events) {
        write_row(out, {e.t_cross, e.from_well, e.to_well, e.dwell_before});
    }
}

std::vector<TransitionEvent> read_events(const std::filesystem::path& path) {
    const Table t = read_table(path);
    std::vector<TransitionEvent> events;
    const auto ct = t.column("t_cross"), cf = t.column("from"), cto = t.column("to"),
               cd = t.column("dwell_before");
    for (const auto& row : t.rows) {
        events.push_back(TransitionEvent{row[ct], row[cf], row[cto], row[cd]});
    }
    return events;
}

}  // namespace levyfilter::csv
