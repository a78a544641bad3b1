#include "aoisim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace aoisim {

namespace {

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

bool parse_int(const std::string& s, std::int64_t& out) {
    try {
        std::size_t pos = 0;
        out = std::stoll(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_uint(const std::string& s, std::uint64_t& out) {
    try {
        std::size_t pos = 0;
        out = std::stoull(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

bool parse_vector(const std::string& s, Eigen::VectorXd& out) {
    const auto parts = split(s, ',');
    std::vector<double> vals;
    for (const auto& p : parts) {
        const std::string t = trim(p);
        if (t.empty()) return false;
        double v;
        if (!parse_double(t, v)) return false;
        vals.push_back(v);
    }
    out.resize(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t k = 0; k < vals.size(); ++k) out(static_cast<Eigen::Index>(k)) = vals[k];
    return true;
}

bool parse_matrix(const std::string& s, Eigen::MatrixXd& out) {
    const auto rows = split(s, ';');
    std::vector<Eigen::VectorXd> parsed;
    for (const auto& r : rows) {
        Eigen::VectorXd v;
        if (!parse_vector(trim(r), v)) return false;
        if (!parsed.empty() && v.size() != parsed.front().size()) return false;
        parsed.push_back(v);
    }
    if (parsed.empty()) return false;
    out.resize(static_cast<Eigen::Index>(parsed.size()), parsed.front().size());
    for (std::size_t r = 0; r < parsed.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = parsed[r];
    return true;
}

bool parse_int_list(const std::string& s, std::vector<int>& out) {
    const auto parts = split(s, ',');
    out.clear();
    for (const auto& p : parts) {
        std::int64_t v;
        if (!parse_int(trim(p), v)) return false;
        out.push_back(static_cast<int>(v));
    }
    return true;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"drift",
         {"kind", "block_dims", "gain", "matrix", "offset", "kappa", "base_kind", "base_gain",
          "base_matrix", "base_offset", "table_x", "table_h"}},
        {"noise", {"kind", "scale"}},
        {"objective", {"a_mean", "a_spread", "b_mean", "b_spread"}},
        {"delays", {"default", "diagonal", "declared_p"}},  // plus pair_i_j
        {"schedule", {"regime", "a", "q", "p", "T"}},
        {"run",
         {"variant", "beta", "horizon", "replications", "seed", "x1", "divergence_threshold",
          "momentum_tau", "history_cap"}},
        {"analysis",
         {"epsilon", "exceedance_limit", "window_tolerance", "burn_in", "tracking_tolerance",
          "tracking_slack", "segment_burn_in", "delta_burn_in", "error_tolerance", "twin_tolerance",
          "noise_probe_factor"}},
        {"output", {"directory", "format"}},
    };
    return s;
}

bool is_pair_key(const std::string& key, int& i, int& j) {
    if (key.rfind("pair_", 0) != 0) return false;
    const auto rest = key.substr(5);
    const auto us = rest.find('_');
    if (us == std::string::npos) return false;
    std::int64_t a, b;
    if (!parse_int(rest.substr(0, us), a) || !parse_int(rest.substr(us + 1), b)) return false;
    i = static_cast<int>(a);
    j = static_cast<int>(b);
    return true;
}

}  // namespace

std::optional<AoiModel> parse_aoi_model(const std::string& text, std::string* error) {
    const std::string t = trim(text);
    std::string name = t;
    std::map<std::string, std::string> params;
    const auto open = t.find('(');
    if (open != std::string::npos) {
        if (t.back() != ')') {
            if (error) *error = "model spec missing closing ')'";
            return std::nullopt;
        }
        name = trim(t.substr(0, open));
        const std::string inner = t.substr(open + 1, t.size() - open - 2);
        if (!trim(inner).empty()) {
            for (const auto& part : split(inner, ',')) {
                const auto eq = part.find('=');
                if (eq == std::string::npos) {
                    if (error) *error = "model parameter must be key=value: '" + trim(part) + "'";
                    return std::nullopt;
                }
                params[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
            }
        }
    }

    auto num = [&](const char* key, double& out) {
        auto it = params.find(key);
        if (it == params.end()) return false;
        return parse_double(it->second, out);
    };
    auto require = [&](const char* key, double& out) {
        if (!num(key, out)) {
            if (error) *error = "model '" + name + "' needs numeric parameter '" + key + "'";
            return false;
        }
        return true;
    };

    try {
        AoiModel model;
        double v = 0;
        if (name == "zero") {
            model = AoiModel::zero();
        } else if (name == "constant") {
            if (!require("c", v)) return std::nullopt;
            model = AoiModel::constant(static_cast<std::int64_t>(v));
        } else if (name == "bounded-uniform") {
            if (!require("B", v)) return std::nullopt;
            model = AoiModel::bounded_uniform(static_cast<std::int64_t>(v));
        } else if (name == "bernoulli-refresh") {
            if (!require("q", v)) return std::nullopt;
            model = AoiModel::bernoulli_refresh(v);
        } else if (name == "pareto-refresh") {
            if (!require("alpha", v)) return std::nullopt;
            model = AoiModel::pareto_refresh(v);
        } else if (name == "walk-with-reset") {
            if (!require("q", v)) return std::nullopt;
            model = AoiModel::walk_with_reset(v);
        } else if (name == "scripted") {
            auto it = params.find("path");
            if (it == params.end()) {
                if (error) *error = "scripted model needs parameter 'path'";
                return std::nullopt;
            }
            model = AoiModel::scripted(load_scripted_trace(it->second).values);
        } else {
            if (error) *error = "unknown delay model '" + name + "'";
            return std::nullopt;
        }
        if (num("offset", v)) model.seed_offset = static_cast<std::uint64_t>(v);
        return model;
    } catch (const std::exception& ex) {
        if (error) *error = ex.what();
        return std::nullopt;
    }
}

std::vector<ConfigError> ExperimentConfig::parse_file(const std::string& path, ExperimentConfig& out) {
    std::ifstream in(path);
    if (!in) return {{path, "cannot open config file"}};
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path, out);
}

std::vector<ConfigError> ExperimentConfig::parse_string(const std::string& text, const std::string& origin,
                                                        ExperimentConfig& out) {
    std::vector<ConfigError> errors;
    auto err = [&](const std::string& where, const std::string& msg) {
        errors.push_back(ConfigError{where, msg});
    };

    // --- raw scan -----------------------------------------------------------
    struct Entry {
        std::string section, key, value;
        int line;
    };
    std::vector<Entry> entries;
    {
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        std::set<std::string> seen;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            const std::string t = trim(line);
            if (t.empty()) continue;
            const std::string where = origin + ":" + std::to_string(lineno);
            if (t.front() == '[') {
                if (t.back() != ']') {
                    err(where, "malformed section header");
                    continue;
                }
                section = trim(t.substr(1, t.size() - 2));
                if (schema().find(section) == schema().end()) {
                    err(where, "unknown section [" + section + "]");
                    section.clear();
                }
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                err(where, "expected 'key = value'");
                continue;
            }
            if (section.empty()) {
                err(where, "entry outside any known section");
                continue;
            }
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            int pi, pj;
            const bool known = schema().at(section).count(key) > 0 ||
                               (section == "delays" && is_pair_key(key, pi, pj));
            if (!known) {
                err(where, "unknown key '" + key + "' in section [" + section + "]");
                continue;
            }
            if (!seen.insert(section + "." + key).second) {
                err(where, "duplicate key '" + key + "' in section [" + section + "]");
                continue;
            }
            entries.push_back(Entry{section, key, value, lineno});
        }
    }

    // --- typed extraction ----------------------------------------------------
    for (const Entry& e : entries) {
        const std::string where = origin + ":" + std::to_string(e.line);
        auto bad = [&](const std::string& what) { err(where, "key '" + e.key + "': " + what); };
        auto as_double = [&](double& dst, bool positive = false) {
            double v;
            if (!parse_double(e.value, v))
                bad("expected a number, got '" + e.value + "'");
            else if (positive && !(v > 0.0))
                bad("must be positive");
            else
                dst = v;
        };
        auto as_int = [&](std::int64_t& dst) {
            std::int64_t v;
            if (!parse_int(e.value, v))
                bad("expected an integer, got '" + e.value + "'");
            else
                dst = v;
        };

        if (e.section == "drift") {
            if (e.key == "kind") out.drift.kind = e.value;
            else if (e.key == "block_dims") {
                if (!parse_int_list(e.value, out.drift.block_dims)) bad("expected a comma-separated integer list");
            } else if (e.key == "gain") as_double(out.drift.gain);
            else if (e.key == "base_gain") as_double(out.drift.base_gain);
            else if (e.key == "kappa") as_double(out.drift.kappa);
            else if (e.key == "base_kind") out.drift.base_kind = e.value;
            else if (e.key == "matrix" || e.key == "base_matrix") {
                Eigen::MatrixXd m;
                if (!parse_matrix(e.value, m)) bad("expected a matrix: rows ';'-separated, entries ','-separated");
                else (e.key == "matrix" ? out.drift.matrix : out.drift.base_matrix) = m;
            } else if (e.key == "offset" || e.key == "base_offset") {
                Eigen::VectorXd v;
                if (!parse_vector(e.value, v)) bad("expected a comma-separated number list");
                else (e.key == "offset" ? out.drift.offset : out.drift.base_offset) = v;
            } else if (e.key == "table_x" || e.key == "table_h") {
                Eigen::VectorXd v;
                if (!parse_vector(e.value, v)) bad("expected a comma-separated number list");
                else {
                    auto& dst = e.key == "table_x" ? out.drift.table_x : out.drift.table_h;
                    dst.assign(v.data(), v.data() + v.size());
                }
            }
        } else if (e.section == "noise") {
            if (e.key == "kind") out.noise.kind = e.value;
            else if (e.key == "scale") as_double(out.noise.scale);
        } else if (e.section == "objective") {
            out.objective.present = true;
            if (e.key == "a_mean" || e.key == "a_spread") {
                Eigen::MatrixXd m;
                if (!parse_matrix(e.value, m)) bad("expected a matrix");
                else (e.key == "a_mean" ? out.objective.a_mean : out.objective.a_spread) = m;
            } else {
                Eigen::VectorXd v;
                if (!parse_vector(e.value, v)) bad("expected a vector");
                else (e.key == "b_mean" ? out.objective.b_mean : out.objective.b_spread) = v;
            }
        } else if (e.section == "delays") {
            if (e.key == "declared_p") as_double(out.delays.declared_p, true);
            else {
                std::string perr;
                auto model = parse_aoi_model(e.value, &perr);
                if (!model) {
                    bad(perr);
                } else if (e.key == "default") {
                    out.delays.fill = *model;
                } else if (e.key == "diagonal") {
                    out.delays.diagonal = *model;
                } else {
                    int i, j;
                    is_pair_key(e.key, i, j);
                    out.delays.overrides[{i, j}] = *model;
                }
            }
        } else if (e.section == "schedule") {
            if (e.key == "regime") out.schedule.regime = e.value;
            else if (e.key == "a") as_double(out.schedule.a, true);
            else if (e.key == "q") {
                double v;
                if (!parse_double(e.value, v)) bad("expected a number");
                else out.schedule.q = v;
            } else if (e.key == "p") {
                double v;
                if (!parse_double(e.value, v)) bad("expected a number");
                else out.schedule.p = v;
            } else if (e.key == "T") as_double(out.schedule.segment_length, true);
        } else if (e.section == "run") {
            if (e.key == "variant") out.run_spec.variant = e.value;
            else if (e.key == "beta") as_double(out.run_spec.beta);
            else if (e.key == "horizon") as_int(out.run_spec.horizon);
            else if (e.key == "replications") {
                std::int64_t v = 0;
                as_int(v);
                out.run_spec.replications = static_cast<int>(v);
            } else if (e.key == "seed") {
                std::uint64_t v;
                if (!parse_uint(e.value, v)) bad("expected a non-negative integer");
                else out.run_spec.seed = v;
            } else if (e.key == "x1") {
                Eigen::VectorXd v;
                if (!parse_vector(e.value, v)) bad("expected a comma-separated number list");
                else out.run_spec.x1 = v;
            } else if (e.key == "divergence_threshold") as_double(out.run_spec.divergence_threshold, true);
            else if (e.key == "momentum_tau") out.run_spec.momentum_tau = e.value;
            else if (e.key == "history_cap") {
                std::int64_t v = 0;
                as_int(v);
                out.run_spec.history_cap = v;
            }
        } else if (e.section == "analysis") {
            if (e.key == "epsilon") as_double(out.analysis.epsilon);
            else if (e.key == "exceedance_limit") as_int(out.analysis.exceedance_limit);
            else if (e.key == "window_tolerance") as_double(out.analysis.window_tolerance, true);
            else if (e.key == "burn_in") as_int(out.analysis.burn_in);
            else if (e.key == "tracking_tolerance") as_double(out.analysis.tracking_tolerance, true);
            else if (e.key == "tracking_slack") as_double(out.analysis.tracking_slack, true);
            else if (e.key == "segment_burn_in") as_int(out.analysis.segment_burn_in);
            else if (e.key == "delta_burn_in") as_int(out.analysis.delta_burn_in);
            else if (e.key == "error_tolerance") as_double(out.analysis.error_tolerance, true);
            else if (e.key == "twin_tolerance") as_double(out.analysis.twin_tolerance, true);
            else if (e.key == "noise_probe_factor") as_double(out.analysis.noise_probe_factor, true);
        } else if (e.section == "output") {
            if (e.key == "directory") out.output.directory = e.value;
            else if (e.key == "format") out.output.format = e.value;
        }
    }

    // --- cross-field validation ----------------------------------------------
    auto serr = [&](const std::string& section, const std::string& msg) {
        err("[" + section + "]", msg);
    };
    const int d = out.dimension();
    const int D = static_cast<int>(out.drift.block_dims.size());
    for (int v : out.drift.block_dims)
        if (v < 1) serr("drift", "block_dims entries must be positive");

    static const std::set<std::string> drift_kinds = {"linear", "affine", "quadratic-objective",
                                                      "regularized", "scripted-table"};
    if (!drift_kinds.count(out.drift.kind))
        serr("drift", "unknown kind '" + out.drift.kind + "'");
    if (out.drift.matrix && (out.drift.matrix->rows() != d || out.drift.matrix->cols() != d))
        serr("drift", "matrix must be " + std::to_string(d) + "x" + std::to_string(d));
    if (out.drift.offset && out.drift.offset->size() != d)
        serr("drift", "offset must have dimension " + std::to_string(d));
    if (out.drift.kind == "scripted-table") {
        if (d != 1) serr("drift", "scripted-table drift is 1-d; block_dims must be 1");
        if (out.drift.table_x.size() < 2 || out.drift.table_x.size() != out.drift.table_h.size())
            serr("drift", "table_x and table_h need equal length >= 2");
    }
    if (out.drift.kind == "quadratic-objective" && !out.objective.present)
        serr("drift", "quadratic-objective drift needs an [objective] section");
    if (out.drift.kind == "regularized") {
        if (out.drift.base_kind != "linear" && out.drift.base_kind != "affine")
            serr("drift", "regularized base_kind must be linear or affine");
        if (!(out.drift.kappa >= 0.0)) serr("drift", "kappa must be >= 0");
    }

    static const std::set<std::string> noise_kinds = {"zero", "gaussian-scaled", "bounded-uniform"};
    if (!noise_kinds.count(out.noise.kind)) serr("noise", "unknown kind '" + out.noise.kind + "'");
    if (out.noise.scale < 0.0) serr("noise", "scale must be >= 0");

    if (out.objective.present) {
        auto shape_ok = [&](const std::optional<Eigen::MatrixXd>& m) {
            return m && m->rows() == d && m->cols() == d;
        };
        if (!shape_ok(out.objective.a_mean))
            serr("objective", "a_mean must be a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
        if (out.objective.a_spread && !shape_ok(out.objective.a_spread))
            serr("objective", "a_spread must match a_mean's shape");
        if (!out.objective.b_mean || out.objective.b_mean->size() != d)
            serr("objective", "b_mean must have dimension " + std::to_string(d));
        if (out.objective.b_spread && out.objective.b_spread->size() != d)
            serr("objective", "b_spread must have dimension " + std::to_string(d));
    }

    for (const auto& [pair, model] : out.delays.overrides) {
        (void)model;
        if (pair.first < 1 || pair.first > D || pair.second < 1 || pair.second > D)
            serr("delays", "pair_" + std::to_string(pair.first) + "_" + std::to_string(pair.second) +
                               " outside the " + std::to_string(D) + "x" + std::to_string(D) + " matrix");
    }
    if (!(out.delays.declared_p > 0.0)) serr("delays", "declared_p must be positive");

    const double p = out.resolved_p();
    if (out.schedule.regime == "harmonic") {
        if (!(p > 0.0 && p <= 1.0))
            serr("schedule", "harmonic regime requires p in (0,1]; declared p=" + fmt(p) +
                                 " needs the power regime");
    } else if (out.schedule.regime == "power") {
        if (!(p > 1.0))
            serr("schedule", "power regime requires p > 1; declared p=" + fmt(p) +
                                 " mandates the harmonic regime");
        else if (out.schedule.q && !(*out.schedule.q > 1.0 && *out.schedule.q < std::min(2.0, p)))
            serr("schedule", "q must satisfy 1 < q < min{2,p}; got q=" + fmt(*out.schedule.q));
    } else {
        serr("schedule", "unknown regime '" + out.schedule.regime + "'");
    }

    if (out.run_spec.variant != "plain" && out.run_spec.variant != "heavy-ball")
        serr("run", "variant must be plain or heavy-ball");
    if (!(out.run_spec.beta >= 0.0 && out.run_spec.beta < 1.0))
        serr("run", "beta must lie in [0,1); got " + fmt(out.run_spec.beta));
    if (out.run_spec.horizon < 1) serr("run", "horizon must be >= 1");
    if (out.run_spec.replications < 1) serr("run", "replications must be >= 1");
    if (out.run_spec.x1 && out.run_spec.x1->size() != d)
        serr("run", "x1 must have dimension " + std::to_string(d));
    if (out.run_spec.momentum_tau != "log" && out.run_spec.momentum_tau != "stepsize-sum")
        serr("run", "momentum_tau must be log or stepsize-sum");
    if (out.run_spec.history_cap && *out.run_spec.history_cap < 1)
        serr("run", "history_cap must be >= 1");
    if (out.run_spec.variant == "heavy-ball") {
        const bool any_delay = out.delays.fill.kind != AoiKind::zero ||
                               (out.delays.diagonal && out.delays.diagonal->kind != AoiKind::zero) ||
                               std::any_of(out.delays.overrides.begin(), out.delays.overrides.end(),
                                           [](const auto& kv) { return kv.second.kind != AoiKind::zero; });
        if (any_delay) serr("run", "heavy-ball variant requires an all-zero delay matrix");
    }

    if (!(out.analysis.epsilon > 0.0 && out.analysis.epsilon < 1.0))
        serr("analysis", "epsilon must lie in (0,1)");
    if (out.analysis.tracking_slack < 1.0) serr("analysis", "tracking_slack must be >= 1");

    if (out.output.format != "csv" && out.output.format != "summary" && out.output.format != "both")
        serr("output", "format must be csv, summary or both");
    if (out.output.directory.empty()) serr("output", "directory must not be empty");

    return errors;
}

int ExperimentConfig::dimension() const {
    int d = 0;
    for (int v : drift.block_dims) d += v;
    return d;
}

std::shared_ptr<const DriftField> ExperimentConfig::make_drift() const {
    const int d = dimension();
    auto gain_matrix = [&](const std::optional<Eigen::MatrixXd>& m, double g) {
        return m ? *m : Eigen::MatrixXd(g * Eigen::MatrixXd::Identity(d, d));
    };
    if (drift.kind == "linear")
        return std::make_shared<LinearDrift>(drift.block_dims, gain_matrix(drift.matrix, drift.gain));
    if (drift.kind == "affine")
        return std::make_shared<AffineDrift>(drift.block_dims, gain_matrix(drift.matrix, drift.gain),
                                             drift.offset ? *drift.offset
                                                          : Eigen::VectorXd(Eigen::VectorXd::Zero(d)));
    if (drift.kind == "quadratic-objective") return drift_from_objective(*make_objective(), drift.block_dims);
    if (drift.kind == "regularized") {
        std::shared_ptr<const DriftField> base;
        const Eigen::MatrixXd s = gain_matrix(drift.base_matrix, drift.base_gain);
        if (drift.base_kind == "affine")
            base = std::make_shared<AffineDrift>(drift.block_dims, s,
                                                 drift.base_offset ? *drift.base_offset
                                                                   : Eigen::VectorXd(Eigen::VectorXd::Zero(d)));
        else
            base = std::make_shared<LinearDrift>(drift.block_dims, s);
        return std::make_shared<RegularizedDrift>(base, drift.kappa);
    }
    if (drift.kind == "scripted-table")
        return std::make_shared<ScriptedTableDrift>(drift.table_x, drift.table_h);
    throw std::invalid_argument("unknown drift kind: " + drift.kind);
}

NoiseModel ExperimentConfig::make_noise() const {
    if (noise.kind == "zero") return NoiseModel::zero(drift.block_dims);
    if (noise.kind == "gaussian-scaled") return NoiseModel::gaussian_scaled(noise.scale, drift.block_dims);
    return NoiseModel::bounded_uniform(noise.scale, drift.block_dims);
}

std::shared_ptr<const QuadraticObjective> ExperimentConfig::make_objective() const {
    if (!objective.present) throw std::invalid_argument("no [objective] section configured");
    const int d = dimension();
    return std::make_shared<QuadraticObjective>(
        *objective.a_mean,
        objective.a_spread ? *objective.a_spread : Eigen::MatrixXd(Eigen::MatrixXd::Zero(d, d)),
        *objective.b_mean,
        objective.b_spread ? *objective.b_spread : Eigen::VectorXd(Eigen::VectorXd::Zero(d)));
}

std::vector<AoiModel> ExperimentConfig::make_delay_matrix() const {
    const int D = static_cast<int>(drift.block_dims.size());
    std::vector<AoiModel> matrix(static_cast<std::size_t>(D) * D);
    for (int i = 1; i <= D; ++i)
        for (int j = 1; j <= D; ++j) {
            AoiModel m = i == j ? delays.diagonal.value_or(AoiModel::zero()) : delays.fill;
            const auto it = delays.overrides.find({i, j});
            if (it != delays.overrides.end()) m = it->second;
            matrix[static_cast<std::size_t>((i - 1) * D + (j - 1))] = m;
        }
    return matrix;
}

StepSchedule ExperimentConfig::make_schedule() const {
    const double p = resolved_p();
    if (schedule.regime == "harmonic") return StepSchedule::harmonic(schedule.a, p);
    return schedule.q ? StepSchedule::power_with_q(schedule.a, *schedule.q, p)
                      : StepSchedule::power(schedule.a, p);
}

SimConfig ExperimentConfig::make_sim_config() const {
    SimConfig cfg;
    cfg.drift = make_drift();
    cfg.noise = make_noise();
    if (drift.kind == "quadratic-objective" && objective.present) cfg.objective = make_objective();
    cfg.delays = make_delay_matrix();
    cfg.schedule = make_schedule();
    cfg.horizon = run_spec.horizon;
    cfg.x1 = run_spec.x1 ? *run_spec.x1 : Eigen::VectorXd(Eigen::VectorXd::Ones(dimension()));
    cfg.seed = run_spec.seed;
    cfg.variant = run_spec.variant == "heavy-ball" ? Variant::heavy_ball : Variant::plain;
    cfg.beta = run_spec.beta;
    cfg.momentum_tau_kind = run_spec.momentum_tau == "stepsize-sum" ? MomentumTauKind::stepsize_sum
                                                                    : MomentumTauKind::log_time;
    cfg.history_cap = run_spec.history_cap;
    cfg.divergence_threshold = run_spec.divergence_threshold;
    return cfg;
}

SgdExperimentSpec ExperimentConfig::make_sgd_spec() const {
    SgdExperimentSpec spec;
    spec.objective = make_objective();
    spec.block_dims = drift.block_dims;
    spec.delays = make_delay_matrix();
    spec.schedule = make_schedule();
    spec.horizon = run_spec.horizon;
    spec.replications = run_spec.replications;
    spec.master_seed = run_spec.seed;
    spec.x1 = run_spec.x1 ? *run_spec.x1 : Eigen::VectorXd(Eigen::VectorXd::Ones(dimension()));
    spec.divergence_threshold = run_spec.divergence_threshold;
    return spec;
}

MomentumExperimentSpec ExperimentConfig::make_momentum_spec() const {
    MomentumExperimentSpec spec;
    spec.drift = make_drift();
    spec.noise = make_noise();
    if (drift.kind == "quadratic-objective" && objective.present) spec.objective = make_objective();
    spec.beta = run_spec.beta;
    spec.schedule = make_schedule();
    spec.horizon = run_spec.horizon;
    spec.replications = run_spec.replications;
    spec.master_seed = run_spec.seed;
    spec.x1 = run_spec.x1 ? *run_spec.x1 : Eigen::VectorXd(Eigen::VectorXd::Ones(dimension()));
    spec.delta_burn_in = analysis.delta_burn_in;
    spec.divergence_threshold = run_spec.divergence_threshold;
    return spec;
}

std::string ExperimentConfig::canonical_string() const {
    std::ostringstream os;
    auto mat = [&](const std::optional<Eigen::MatrixXd>& m) {
        if (!m) return std::string("-");
        std::string s;
        for (Eigen::Index r = 0; r < m->rows(); ++r) {
            if (r) s += ";";
            for (Eigen::Index c = 0; c < m->cols(); ++c) {
                if (c) s += ",";
                s += fmt((*m)(r, c));
            }
        }
        return s;
    };
    auto vec = [&](const std::optional<Eigen::VectorXd>& v) {
        if (!v) return std::string("-");
        std::string s;
        for (Eigen::Index k = 0; k < v->size(); ++k) {
            if (k) s += ",";
            s += fmt((*v)(k));
        }
        return s;
    };
    os << "drift.kind = " << drift.kind << "\n";
    os << "drift.block_dims =";
    for (int v : drift.block_dims) os << " " << v;
    os << "\n";
    os << "drift.gain = " << fmt(drift.gain) << "\n";
    os << "drift.matrix = " << mat(drift.matrix) << "\n";
    os << "drift.offset = " << vec(drift.offset) << "\n";
    os << "drift.kappa = " << fmt(drift.kappa) << "\n";
    os << "noise.kind = " << noise.kind << "\n";
    os << "noise.scale = " << fmt(noise.scale) << "\n";
    os << "objective.a_mean = " << mat(objective.a_mean) << "\n";
    os << "objective.a_spread = " << mat(objective.a_spread) << "\n";
    os << "objective.b_mean = " << vec(objective.b_mean) << "\n";
    os << "objective.b_spread = " << vec(objective.b_spread) << "\n";
    os << "delays.default = " << delays.fill.id() << "\n";
    os << "delays.diagonal = " << (delays.diagonal ? delays.diagonal->id() : "zero") << "\n";
    for (const auto& [pair, model] : delays.overrides)
        os << "delays.pair_" << pair.first << "_" << pair.second << " = " << model.id() << "\n";
    os << "delays.declared_p = " << fmt(delays.declared_p) << "\n";
    os << "schedule.regime = " << schedule.regime << "\n";
    os << "schedule.a = " << fmt(schedule.a) << "\n";
    os << "schedule.q = " << (schedule.q ? fmt(*schedule.q) : "-") << "\n";
    os << "schedule.p = " << fmt(resolved_p()) << "\n";
    os << "schedule.T = " << fmt(schedule.segment_length) << "\n";
    os << "run.variant = " << run_spec.variant << "\n";
    os << "run.beta = " << fmt(run_spec.beta) << "\n";
    os << "run.horizon = " << run_spec.horizon << "\n";
    os << "run.replications = " << run_spec.replications << "\n";
    os << "run.seed = " << run_spec.seed << "\n";
    os << "run.x1 = " << vec(run_spec.x1) << "\n";
    os << "run.momentum_tau = " << run_spec.momentum_tau << "\n";
    return os.str();
}

std::string ExperimentConfig::config_hash() const { return fnv1a_hex(canonical_string()); }

}  // namespace aoisim
