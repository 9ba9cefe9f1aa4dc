#include "cinfer/io.hpp"

#include "cinfer/numeric.hpp"

#include <json.hpp> // vendored nlohmann/json

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cinfer::io {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

json parse(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(path + ":" + std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
}

void write_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(path + ": write failed");
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// -inf scores are stored as JSON null (JSON has no infinities)
json score_to_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double score_from_json(const json& j) { return j.is_null() ? neg_inf : j.get<double>(); }

int require_index(const json& j, int bound, const std::string& path, const std::string& what) {
    const int v = j.get<int>();
    if (v < 0 || v >= bound)
        throw IoError(path + ": " + what + " index " + std::to_string(v) + " out of range [0, " +
                      std::to_string(bound) + ")");
    return v;
}

} // namespace

Mdp load_mdp(const std::string& path) {
    const json j = parse(path);
    try {
        const int nx = j.at("num_states").get<int>();
        const int na = j.at("num_actions").get<int>();
        const int horizon = j.at("horizon").get<int>();
        if (nx < 1 || na < 1 || horizon < 1)
            throw IoError(path + ": num_states, num_actions and horizon must be positive");

        std::vector<Eigen::MatrixXd> transition(na, Eigen::MatrixXd::Zero(nx, nx));
        for (const json& entry : j.at("transitions")) {
            if (!entry.is_array() || entry.size() != 4)
                throw IoError(path + ": each transitions entry must be [x, a, x', p]");
            const int x = require_index(entry[0], nx, path, "transition state");
            const int a = require_index(entry[1], na, path, "transition action");
            const int xp = require_index(entry[2], nx, path, "transition successor");
            transition[a](x, xp) = entry[3].get<double>();
        }

        Eigen::MatrixXd running = Eigen::MatrixXd::Zero(nx, na);
        for (const json& entry : j.at("running_reward")) {
            if (!entry.is_array() || entry.size() != 3)
                throw IoError(path + ": each running_reward entry must be [x, a, value]");
            const int x = require_index(entry[0], nx, path, "reward state");
            const int a = require_index(entry[1], na, path, "reward action");
            running(x, a) = entry[2].get<double>();
        }

        const json& term = j.at("terminal_reward");
        if (!term.is_array() || static_cast<int>(term.size()) != nx)
            throw IoError(path + ": terminal_reward must list one value per state");
        Eigen::VectorXd terminal(nx);
        for (int x = 0; x < nx; ++x) terminal(x) = term[x].get<double>();

        return Mdp(nx, na, horizon, std::move(transition), std::move(running), std::move(terminal));
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

void save_mdp(const Mdp& mdp, const std::string& path) {
    json j;
    j["num_states"] = mdp.num_states();
    j["num_actions"] = mdp.num_actions();
    j["horizon"] = mdp.horizon();
    json transitions = json::array();
    for (int x = 0; x < mdp.num_states(); ++x) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            for (const Successor& s : mdp.successors(x, a)) {
                transitions.push_back({x, a, s.state, s.prob});
            }
        }
    }
    j["transitions"] = std::move(transitions);
    json rewards = json::array();
    for (int x = 0; x < mdp.num_states(); ++x) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            if (mdp.running_reward()(x, a) != 0.0)
                rewards.push_back({x, a, mdp.running_reward()(x, a)});
        }
    }
    j["running_reward"] = std::move(rewards);
    j["terminal_reward"] = std::vector<double>(mdp.terminal_reward().begin(),
                                               mdp.terminal_reward().end());
    write_file(j, path);
}

ConstraintSet load_constraints(const std::string& path) {
    const json j = parse(path);
    try {
        ConstraintSet c;
        const json& psi = j.at("psi");
        if (!psi.is_array() || psi.empty())
            throw IoError(path + ": psi must be a non-empty list");
        c.psi.resize(static_cast<Eigen::Index>(psi.size()));
        for (std::size_t x = 0; x < psi.size(); ++x) {
            const double v = psi[x].get<double>();
            if (!(v >= 0.0 && v <= 1.0))
                throw IoError(path + ": psi[" + std::to_string(x) + "] = " + fmt_double(v) +
                              " outside [0, 1]");
            c.psi(static_cast<Eigen::Index>(x)) = v;
        }
        if (j.contains("forbidden_actions")) {
            for (const json& a : j.at("forbidden_actions")) c.forbid_action(a.get<int>());
        }
        return c;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

void save_constraints(const ConstraintSet& c, const std::string& path) {
    json j;
    j["psi"] = std::vector<double>(c.psi.begin(), c.psi.end());
    j["forbidden_actions"] = c.forbidden_actions;
    write_file(j, path);
}

DemonstrationSet load_demos(const std::string& path) {
    const json j = parse(path);
    try {
        DemonstrationSet demos;
        demos.horizon = j.at("horizon").get<int>();
        if (demos.horizon < 1) throw IoError(path + ": horizon must be >= 1");
        for (const json& tj : j.at("trajectories")) {
            Trajectory traj;
            traj.states = tj.at("states").get<std::vector<int>>();
            traj.actions = tj.at("actions").get<std::vector<int>>();
            if (traj.states.size() != static_cast<std::size_t>(demos.horizon) + 1 ||
                traj.actions.size() != static_cast<std::size_t>(demos.horizon))
                throw IoError(path + ": trajectory " + std::to_string(demos.trajectories.size()) +
                              " does not match the declared horizon");
            demos.trajectories.push_back(std::move(traj));
        }
        if (j.contains("metadata")) {
            const json& m = j.at("metadata");
            demos.meta.seed = m.value("seed", std::uint64_t{0});
            demos.meta.generator = m.value("generator", std::string{});
            demos.meta.abort_count = m.value("abort_count", 0);
        }
        return demos;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

void save_demos(const DemonstrationSet& demos, const std::string& path) {
    json j;
    j["horizon"] = demos.horizon;
    json trajectories = json::array();
    for (const Trajectory& traj : demos.trajectories) {
        trajectories.push_back({{"states", traj.states}, {"actions", traj.actions}});
    }
    j["trajectories"] = std::move(trajectories);
    j["metadata"] = {{"seed", demos.meta.seed},
                     {"generator", demos.meta.generator},
                     {"abort_count", demos.meta.abort_count}};
    write_file(j, path);
}

namespace {

Cell cell_from_json(const json& j, const std::string& path, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw IoError(path + ": " + what + " must be [col, row]");
    return {j[0].get<int>(), j[1].get<int>()};
}

} // namespace

GridSpec load_gridspec(const std::string& path) {
    const json j = parse(path);
    try {
        GridSpec spec;
        spec.width = j.at("width").get<int>();
        spec.height = j.at("height").get<int>();
        spec.slip = j.at("slip").get<double>();
        spec.start = cell_from_json(j.at("start"), path, "start");
        spec.goal = cell_from_json(j.at("goal"), path, "goal");
        spec.horizon = j.at("horizon").get<int>();
        if (j.contains("true_constraints")) {
            for (const json& cj : j.at("true_constraints")) {
                CellConstraint cc;
                cc.cell = cell_from_json(cj.at("cell"), path, "constraint cell");
                cc.psi = cj.at("psi").get<double>();
                spec.true_constraints.push_back(cc);
            }
        }
        return spec;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

GridMapping load_mapping(const std::string& path) {
    const json j = parse(path);
    try {
        const int width = j.at("width").get<int>();
        const int height = j.at("height").get<int>();
        GridMapping mapping(width, height);
        const json& cells = j.at("cells");
        if (static_cast<int>(cells.size()) != mapping.num_states())
            throw IoError(path + ": cells must list one entry per state");
        for (int x = 0; x < mapping.num_states(); ++x) {
            const Cell c = cell_from_json(cells[x], path, "cell");
            if (mapping.to_state(c) != x)
                throw IoError(path + ": cells[" + std::to_string(x) +
                              "] does not match the row-major layout");
        }
        return mapping;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

void save_mapping(const GridMapping& mapping, const std::string& path) {
    json cells = json::array();
    for (int x = 0; x < mapping.num_states(); ++x) {
        const Cell c = mapping.to_cell(x);
        cells.push_back({c.col, c.row});
    }
    write_file({{"width", mapping.width()}, {"height", mapping.height()}, {"cells", cells}}, path);
}

namespace {

const char* kind_name(CandidateConstraint::Kind kind) {
    return kind == CandidateConstraint::Kind::state ? "state" : "action";
}

CandidateConstraint::Kind kind_from_name(const std::string& name, const std::string& path) {
    if (name == "state") return CandidateConstraint::Kind::state;
    if (name == "action") return CandidateConstraint::Kind::action;
    throw IoError(path + ": unknown candidate kind '" + name + "'");
}

json candidate_to_json(const CandidateConstraint& cand) {
    json j{{"kind", kind_name(cand.kind)}, {"target", cand.target}};
    if (cand.kind == CandidateConstraint::Kind::state) j["psi"] = cand.psi;
    return j;
}

CandidateConstraint candidate_from_json(const json& j, const std::string& path) {
    CandidateConstraint cand;
    cand.kind = kind_from_name(j.at("kind").get<std::string>(), path);
    cand.target = j.at("target").get<int>();
    cand.psi = j.value("psi", 0.0);
    return cand;
}

} // namespace

void save_result(const InferenceResult& result, const InferenceOptions& options,
                 const std::string& path) {
    json j;
    j["status"] = to_string(result.status);
    j["num_demonstrations"] = result.num_demonstrations;
    j["options"] = {{"max_iterations", options.max_iterations},
                    {"stop_gain", options.stop_gain},
                    {"fixed_psi", options.fixed_psi ? json(*options.fixed_psi) : json(nullptr)}};
    json selected = json::array();
    for (const SelectedConstraint& s : result.selected) {
        json entry = candidate_to_json(s.candidate);
        entry["iteration"] = s.iteration;
        entry["score"] = score_to_json(s.score);
        selected.push_back(std::move(entry));
    }
    j["selected"] = std::move(selected);
    j["final_constraints"] = {
        {"psi", std::vector<double>(result.final_constraints.psi.begin(),
                                    result.final_constraints.psi.end())},
        {"forbidden_actions", result.final_constraints.forbidden_actions}};
    json trace = json::array();
    for (const IterationTrace& it : result.trace) {
        json candidates = json::array();
        for (const CandidateScore& cs : it.candidates) {
            json entry = candidate_to_json(cs.candidate);
            entry["score"] = score_to_json(cs.score);
            entry["excluded"] = cs.excluded;
            entry["selected"] = cs.selected;
            candidates.push_back(std::move(entry));
        }
        trace.push_back({{"iteration", it.iteration}, {"candidates", std::move(candidates)}});
    }
    j["trace"] = std::move(trace);
    write_file(j, path);
}

InferenceResult load_result(const std::string& path) {
    const json j = parse(path);
    try {
        InferenceResult result;
        const std::string status = j.at("status").get<std::string>();
        if (status == "max_iterations") result.status = InferenceStatus::max_iterations;
        else if (status == "converged") result.status = InferenceStatus::converged;
        else if (status == "exhausted") result.status = InferenceStatus::exhausted;
        else throw IoError(path + ": unknown status '" + status + "'");
        result.num_demonstrations = j.value("num_demonstrations", 0);
        for (const json& sj : j.at("selected")) {
            SelectedConstraint s;
            s.iteration = sj.at("iteration").get<int>();
            s.candidate = candidate_from_json(sj, path);
            s.score = score_from_json(sj.at("score"));
            result.selected.push_back(s);
        }
        const json& fc = j.at("final_constraints");
        const auto psi = fc.at("psi").get<std::vector<double>>();
        result.final_constraints.psi =
            Eigen::Map<const Eigen::VectorXd>(psi.data(), static_cast<Eigen::Index>(psi.size()));
        for (const json& a : fc.at("forbidden_actions"))
            result.final_constraints.forbid_action(a.get<int>());
        for (const json& tj : j.at("trace")) {
            IterationTrace it;
            it.iteration = tj.at("iteration").get<int>();
            for (const json& cj : tj.at("candidates")) {
                CandidateScore cs;
                cs.candidate = candidate_from_json(cj, path);
                cs.score = score_from_json(cj.at("score"));
                cs.excluded = cj.at("excluded").get<bool>();
                cs.selected = cj.at("selected").get<bool>();
                it.candidates.push_back(cs);
            }
            result.trace.push_back(std::move(it));
        }
        return result;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

void save_values_csv(const SoftBackupResult& backup, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "t,x,v\n";
    for (Eigen::Index t = 0; t < backup.v.rows(); ++t) {
        for (Eigen::Index x = 0; x < backup.v.cols(); ++x) {
            out << t << ',' << x << ',' << fmt_double(backup.v(t, x)) << '\n';
        }
    }
    if (!out) throw IoError(path + ": write failed");
}

namespace {

void write_candidate_row(std::ostream& out, const CandidateScore& cs, const GridMapping* mapping,
                         bool with_cells) {
    out << kind_name(cs.candidate.kind) << ',' << cs.candidate.target << ',';
    if (with_cells) {
        if (cs.candidate.kind == CandidateConstraint::Kind::state && mapping != nullptr) {
            const Cell c = mapping->to_cell(cs.candidate.target);
            out << c.col << ',' << c.row << ',';
        } else {
            out << ",,";
        }
    }
    if (cs.candidate.kind == CandidateConstraint::Kind::state) out << fmt_double(cs.candidate.psi);
    out << ',' << fmt_double(cs.score) << ',' << (cs.excluded ? 1 : 0) << ','
        << (cs.selected ? 1 : 0) << '\n';
}

} // namespace

void save_iteration_csv(const IterationTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "kind,target,psi,score,excluded,selected\n";
    for (const CandidateScore& cs : trace.candidates) {
        write_candidate_row(out, cs, nullptr, false);
    }
    if (!out) throw IoError(path + ": write failed");
}

void save_heatmap_csv(const IterationTrace& trace, const GridMapping* mapping,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "kind,target,col,row,psi,log_f_at_start,excluded,selected\n";
    for (const CandidateScore& cs : trace.candidates) {
        write_candidate_row(out, cs, mapping, true);
    }
    if (!out) throw IoError(path + ": write failed");
}

} // namespace cinfer::io
