// Command-line front end: closed-form and generated Poisson tensors,
// the identity verification suite, and conservation-monitored integration.
//
// Exit codes: 0 success, 1 verification failures, 2 usage/parse errors,
// 3 domain errors (structured JSON body on stdout).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "volterra/error.hpp"
#include "volterra/hierarchy.hpp"
#include "volterra/integrate.hpp"
#include "volterra/lattice.hpp"
#include "volterra/realization.hpp"
#include "volterra/verify.hpp"

using nlohmann::json;
using namespace volterra;

namespace {

constexpr int kSchemaVersion = 1;

std::ostream& output_stream(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) {
        std::cerr << "error: cannot open output file '" << path << "'\n";
        std::exit(2);
    }
    return file;
}

json matrix_to_json(const Matrix& a) {
    json rows = json::array();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
        rows.push_back(row);
    }
    return rows;
}

void emit_error(const std::string& type, const std::string& message,
                std::optional<double> last_valid_time = std::nullopt) {
    json err = {{"v", kSchemaVersion}, {"error", {{"type", type}, {"message", message}}}};
    if (last_valid_time) err["error"]["last_valid_time"] = *last_valid_time;
    std::cout << err.dump() << "\n";
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("VOLTERRA_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && end != env) return v;
        std::cerr << "warning: VOLTERRA_SEED is not a valid integer, using 0\n";
    }
    return 0;
}

// ---- tensor ------------------------------------------------------------------

struct TensorArgs {
    std::string space = "u";
    int index = 2;
    std::vector<double> at;
    long m = -1;
    long n = -1;
    std::string format = "json";
    std::string out;
};

// Optional --m/--n declarations are cross-checked against the point length
// so a mistyped state fails fast instead of silently running at the wrong
// size.  u-like vectors have m = 2n - 1 entries, qp-like ones 2n.
int check_declared_sizes(bool u_like, std::size_t len, long m, long n) {
    if (u_like) {
        if (m >= 0 && static_cast<std::size_t>(m) != len) {
            std::cerr << "error: --m " << m << " does not match " << len
                      << " state values\n";
            return 2;
        }
        if (n >= 0 && (2 * n - 1 < 0 || static_cast<std::size_t>(2 * n - 1) != len)) {
            std::cerr << "error: --n " << n << " corresponds to " << 2 * n - 1
                      << " lattice sites, got " << len << "\n";
            return 2;
        }
    } else {
        if (n >= 0 && static_cast<std::size_t>(2 * n) != len) {
            std::cerr << "error: --n " << n << " needs " << 2 * n
                      << " phase values, got " << len << "\n";
            return 2;
        }
        if (m >= 0 && static_cast<std::size_t>(m + 1) != len) {
            std::cerr << "error: --m " << m << " corresponds to " << m + 1
                      << " phase values, got " << len << "\n";
            return 2;
        }
    }
    return 0;
}

int run_tensor(const TensorArgs& a) {
    if (int rc = check_declared_sizes(a.space == "u", a.at.size(), a.m, a.n)) return rc;
    if (a.space == "u") {
        if (a.index < 0 || a.index > 3) {
            std::cerr << "error: --space u supports --index 0..3\n";
            return 2;
        }
        if (a.at.size() < 2) {
            std::cerr << "error: --at needs at least two lattice values\n";
            return 2;
        }
    } else if (a.at.size() < 2 || a.at.size() % 2 != 0) {
        std::cerr << "error: --space qp needs an even number of --at values "
                     "(q1..qn,p1..pn)\n";
        return 2;
    }
    const Matrix result = (a.space == "u")
                              ? bracket_pi(a.index, UPoint(a.at))
                              : generate_tensor(a.index, PhasePoint::from_flat(a.at));

    std::ofstream file;
    std::ostream& os = output_stream(a.out, file);
    if (a.format == "json") {
        json doc = {{"v", kSchemaVersion}, {"command", "tensor"},     {"space", a.space},
                    {"index", a.index},    {"at", a.at},              {"matrix", matrix_to_json(result)}};
        os << doc.dump() << "\n";
    } else if (a.format == "csv") {
        os.precision(17);
        for (std::size_t r = 0; r < result.rows(); ++r) {
            for (std::size_t c = 0; c < result.cols(); ++c)
                os << result(r, c) << (c + 1 < result.cols() ? "," : "\n");
        }
    } else { // pretty
        os.precision(10);
        const char* name = (a.space == "u") ? "pi_" : "J_";
        os << name << a.index << " at (";
        for (std::size_t i = 0; i < a.at.size(); ++i)
            os << a.at[i] << (i + 1 < a.at.size() ? ", " : ")\n");
        for (std::size_t r = 0; r < result.rows(); ++r) {
            for (std::size_t c = 0; c < result.cols(); ++c)
                os << (c ? "  " : "  ") << result(r, c);
            os << "\n";
        }
    }
    return 0;
}

// ---- verify ------------------------------------------------------------------

struct VerifyArgs {
    std::string family;
    std::size_t points = 100;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::vector<std::size_t> ms;
    std::vector<std::size_t> ns;
    std::string format = "json";
    std::string out;
};

json report_to_json(const std::string& family, const IdentityReport& r) {
    json failures = json::array();
    for (const auto& [pt, res] : r.failures)
        failures.push_back({{"point", pt}, {"residual", res}});
    return {{"v", kSchemaVersion},
            {"family", family},
            {"identity", r.identity_id},
            {"points", r.points_tested},
            {"max_residual", r.max_residual},
            {"tolerance", r.tolerance},
            {"passed", r.passed},
            {"vacuous", r.vacuous},
            {"note", r.note},
            {"failures", failures}};
}

int run_verify(const VerifyArgs& a) {
    std::vector<std::string> families;
    if (a.family == "all") {
        families = identity_families();
    } else {
        const auto& known = identity_families();
        bool ok = false;
        for (const auto& f : known) ok = ok || (f == a.family);
        if (!ok) {
            std::cerr << "error: unknown family '" << a.family << "'; known:";
            for (const auto& f : known) std::cerr << " " << f;
            std::cerr << " all\n";
            return 2;
        }
        families = {a.family};
    }
    const std::uint64_t seed = a.seed_given ? a.seed : default_seed();

    std::ofstream file;
    std::ostream& os = output_stream(a.out, file);
    std::size_t failed = 0, total = 0;
    for (const std::string& fam : families) {
        const std::vector<IdentityReport> reports =
            run_identity_suite(fam, a.ms, a.ns, a.points, seed);
        for (const IdentityReport& r : reports) {
            ++total;
            if (!r.passed) ++failed;
            if (a.format == "json") {
                os << report_to_json(fam, r).dump() << "\n";
            } else {
                char line[256];
                std::snprintf(line, sizeof(line), "[%s] %-42s max %.3e  tol %.1e  (%zu pts)%s%s",
                              r.passed ? "PASS" : "FAIL", r.identity_id.c_str(),
                              r.max_residual, r.tolerance, r.points_tested,
                              r.vacuous ? "  [vacuous]" : "",
                              r.note.empty() ? "" : ("  -- " + r.note).c_str());
                os << line << "\n";
            }
        }
    }
    std::cerr << total << " identities, " << failed << " failed (seed " << seed
              << ", " << a.points << " points)\n";
    return failed == 0 ? 0 : 1;
}

// ---- integrate ---------------------------------------------------------------

struct IntegrateArgs {
    std::string space = "u";
    std::vector<double> x0;
    long m = -1;
    long n = -1;
    double t_end = 1.0;
    double dt = 1e-3;
    bool no_eigenvalues = false;
    std::string format = "csv";
    std::string out;
};

void emit_csv(std::ostream& os, const std::vector<std::string>& header,
              const std::vector<Vec>& rows) {
    os.precision(17);
    for (std::size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const Vec& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
}

json trajectory_to_json(const Trajectory& tr) {
    return {{"times", tr.times},
            {"states", tr.states},
            {"monitors", tr.monitors},
            {"monitor_names", tr.monitor_names},
            {"note", tr.note}};
}

std::vector<std::string> state_names(const std::string& prefix, std::size_t count) {
    std::vector<std::string> v;
    for (std::size_t i = 1; i <= count; ++i) v.push_back(prefix + std::to_string(i));
    return v;
}

int run_integrate(const IntegrateArgs& a) {
    if (a.x0.empty()) {
        std::cerr << "error: --x0 is required\n";
        return 2;
    }
    const bool u_like = (a.space == "u" || a.space == "henon");
    if (int rc = check_declared_sizes(u_like, a.x0.size(), a.m, a.n)) return rc;
    if (a.dt <= 0.0 || a.t_end < 0.0) {
        std::cerr << "error: need --dt > 0 and --t-end >= 0\n";
        return 2;
    }

    std::ofstream file;
    std::ostream& os = output_stream(a.out, file);
    json summary;
    json doc = {{"v", kSchemaVersion}, {"command", "integrate"}, {"space", a.space},
                {"x0", a.x0},          {"t_end", a.t_end},       {"dt", a.dt}};

    if (a.space == "u") {
        if (a.x0.size() < 2) {
            std::cerr << "error: --space u needs at least two components\n";
            return 2;
        }
        const std::size_t m = a.x0.size();
        const Trajectory tr =
            integrate_volterra(UPoint(a.x0), a.t_end, a.dt, !a.no_eigenvalues);
        summary["max_h_drift"] = monitor_drift(tr, 0, m);
        if (tr.monitor_names.size() > m)
            summary["max_eig_drift"] = monitor_drift(tr, m, tr.monitor_names.size());
        if (!tr.note.empty()) summary["note"] = tr.note;
        if (a.format == "json") {
            doc["trajectory"] = trajectory_to_json(tr);
            doc["summary"] = summary;
            os << doc.dump() << "\n";
        } else {
            std::vector<std::string> header = {"t"};
            const auto sn = state_names("u", m);
            header.insert(header.end(), sn.begin(), sn.end());
            header.insert(header.end(), tr.monitor_names.begin(), tr.monitor_names.end());
            std::vector<Vec> rows;
            for (std::size_t k = 0; k < tr.times.size(); ++k) {
                Vec row = {tr.times[k]};
                row.insert(row.end(), tr.states[k].begin(), tr.states[k].end());
                row.insert(row.end(), tr.monitors[k].begin(), tr.monitors[k].end());
                rows.push_back(row);
            }
            emit_csv(os, header, rows);
            std::cerr << json({{"v", kSchemaVersion}, {"summary", summary}}).dump() << "\n";
        }
        return 0;
    }

    if (a.space == "qp") {
        if (a.x0.size() % 2 != 0 || a.x0.empty()) {
            std::cerr << "error: --space qp needs an even number of components\n";
            return 2;
        }
        const std::size_t n = a.x0.size() / 2;
        const Trajectory tr = integrate_qp(PhasePoint::from_flat(a.x0), a.t_end, a.dt);
        summary["max_h_drift"] = monitor_drift(tr, 0, tr.monitor_names.size());
        if (a.format == "json") {
            doc["trajectory"] = trajectory_to_json(tr);
            doc["summary"] = summary;
            os << doc.dump() << "\n";
        } else {
            std::vector<std::string> header = {"t"};
            const auto qn = state_names("q", n), pn = state_names("p", n);
            header.insert(header.end(), qn.begin(), qn.end());
            header.insert(header.end(), pn.begin(), pn.end());
            header.insert(header.end(), tr.monitor_names.begin(), tr.monitor_names.end());
            std::vector<Vec> rows;
            for (std::size_t k = 0; k < tr.times.size(); ++k) {
                Vec row = {tr.times[k]};
                row.insert(row.end(), tr.states[k].begin(), tr.states[k].end());
                row.insert(row.end(), tr.monitors[k].begin(), tr.monitors[k].end());
                rows.push_back(row);
            }
            emit_csv(os, header, rows);
            std::cerr << json({{"v", kSchemaVersion}, {"summary", summary}}).dump() << "\n";
        }
        return 0;
    }

    if (a.space == "paired") {
        if (a.x0.size() % 2 != 0 || a.x0.empty()) {
            std::cerr << "error: --space paired takes a qp start (even length)\n";
            return 2;
        }
        const std::size_t n = a.x0.size() / 2;
        const std::size_t m = 2 * n - 1;
        const PairedTrajectory pt =
            integrate_qp_vs_u(PhasePoint::from_flat(a.x0), a.t_end, a.dt);
        summary["max_gap"] = pt.max_gap;
        summary["max_h_drift_qp"] =
            monitor_drift(pt.first, 0, pt.first.monitor_names.size());
        summary["max_h_drift_u"] = monitor_drift(pt.second, 0, m);
        if (pt.second.monitor_names.size() > m)
            summary["max_eig_drift_u"] =
                monitor_drift(pt.second, m, pt.second.monitor_names.size());
        if (!pt.second.note.empty()) summary["note"] = pt.second.note;
        if (a.format == "json") {
            doc["qp"] = trajectory_to_json(pt.first);
            doc["u"] = trajectory_to_json(pt.second);
            doc["gap"] = pt.gap;
            doc["summary"] = summary;
            os << doc.dump() << "\n";
        } else {
            std::vector<std::string> header = {"t"};
            const auto qn = state_names("q", n), pn = state_names("p", n),
                       un = state_names("u", m);
            header.insert(header.end(), qn.begin(), qn.end());
            header.insert(header.end(), pn.begin(), pn.end());
            header.insert(header.end(), un.begin(), un.end());
            header.push_back("gap");
            std::vector<Vec> rows;
            for (std::size_t k = 0; k < pt.first.times.size(); ++k) {
                Vec row = {pt.first.times[k]};
                row.insert(row.end(), pt.first.states[k].begin(), pt.first.states[k].end());
                row.insert(row.end(), pt.second.states[k].begin(),
                           pt.second.states[k].end());
                row.push_back(pt.gap[k]);
                rows.push_back(row);
            }
            emit_csv(os, header, rows);
            std::cerr << json({{"v", kSchemaVersion}, {"summary", summary}}).dump() << "\n";
        }
        return 0;
    }

    if (a.space == "henon") {
        if (a.x0.size() < 3 || a.x0.size() % 2 == 0) {
            std::cerr << "error: --space henon needs an odd lattice start (m >= 3)\n";
            return 2;
        }
        const std::size_t m = a.x0.size();
        const std::size_t n = (m + 1) / 2;
        const PairedTrajectory pt = integrate_henon_pair(UPoint(a.x0), a.t_end, a.dt);
        summary["max_gap"] = pt.max_gap;
        summary["max_h_drift_u"] = monitor_drift(pt.first, 0, m);
        if (pt.first.monitor_names.size() > m)
            summary["max_eig_drift_u"] =
                monitor_drift(pt.first, m, pt.first.monitor_names.size());
        if (!pt.first.note.empty()) summary["note"] = pt.first.note;
        if (a.format == "json") {
            doc["u"] = trajectory_to_json(pt.first);
            doc["toda"] = trajectory_to_json(pt.second);
            doc["gap"] = pt.gap;
            doc["summary"] = summary;
            os << doc.dump() << "\n";
        } else {
            std::vector<std::string> header = {"t"};
            const auto un = state_names("u", m), an = state_names("a", n - 1),
                       bn = state_names("b", n);
            header.insert(header.end(), un.begin(), un.end());
            header.insert(header.end(), an.begin(), an.end());
            header.insert(header.end(), bn.begin(), bn.end());
            header.push_back("gap");
            std::vector<Vec> rows;
            for (std::size_t k = 0; k < pt.first.times.size(); ++k) {
                Vec row = {pt.first.times[k]};
                row.insert(row.end(), pt.first.states[k].begin(), pt.first.states[k].end());
                row.insert(row.end(), pt.second.states[k].begin(),
                           pt.second.states[k].end());
                row.push_back(pt.gap[k]);
                rows.push_back(row);
            }
            emit_csv(os, header, rows);
            std::cerr << json({{"v", kSchemaVersion}, {"summary", summary}}).dump() << "\n";
        }
        return 0;
    }

    std::cerr << "error: unknown --space '" << a.space << "'\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volterra lattice multi-Hamiltonian toolkit"};
    app.require_subcommand(1);

    TensorArgs ta;
    CLI::App* tensor = app.add_subcommand("tensor", "evaluate a Poisson tensor at a point");
    tensor->add_option("--space", ta.space, "u or qp")
        ->check(CLI::IsMember({"u", "qp"}));
    tensor->add_option("--index", ta.index, "tensor index (u: 0..3, qp: any integer)")
        ->required();
    tensor->add_option("--at", ta.at, "evaluation point, comma separated")
        ->required()
        ->delimiter(',');
    tensor->add_option("--m", ta.m, "declared lattice size, checked against --at");
    tensor->add_option("--n", ta.n, "declared particle count, checked against --at");
    tensor->add_option("--format", ta.format, "json, csv or pretty")
        ->check(CLI::IsMember({"json", "csv", "pretty"}));
    tensor->add_option("--out", ta.out, "write to file instead of stdout");

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "run an identity family");
    verify->add_option("--family", va.family, "identity family name, or 'all'")
        ->required();
    verify->add_option("--points", va.points, "sample points per identity");
    CLI::Option* seed_opt = verify->add_option("--seed", va.seed,
                                               "RNG seed (else VOLTERRA_SEED, else 0)");
    verify->add_option("--m", va.ms, "lattice sizes, comma separated")->delimiter(',');
    verify->add_option("--n", va.ns, "realization sizes, comma separated")->delimiter(',');
    verify->add_option("--format", va.format, "json (one object per line) or pretty")
        ->check(CLI::IsMember({"json", "pretty"}));
    verify->add_option("--out", va.out, "write to file instead of stdout");

    IntegrateArgs ia;
    CLI::App* integrate = app.add_subcommand("integrate", "fixed-step RK4 with monitors");
    integrate->add_option("--space", ia.space, "u, qp, paired or henon")
        ->check(CLI::IsMember({"u", "qp", "paired", "henon"}));
    integrate->add_option("--x0", ia.x0, "initial state, comma separated")
        ->required()
        ->delimiter(',');
    integrate->add_option("--m", ia.m, "declared lattice size, checked against --x0");
    integrate->add_option("--n", ia.n, "declared particle count, checked against --x0");
    integrate->add_option("--t-end", ia.t_end, "integration time")->required();
    integrate->add_option("--dt", ia.dt, "step size");
    integrate->add_flag("--no-eigenvalues", ia.no_eigenvalues,
                        "skip the Lax eigenvalue monitor");
    integrate->add_option("--format", ia.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    integrate->add_option("--out", ia.out, "write to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    va.seed_given = seed_opt->count() > 0;

    try {
        if (tensor->parsed()) return run_tensor(ta);
        if (verify->parsed()) return run_verify(va);
        return run_integrate(ia);
    } catch (const NonFinite& e) {
        emit_error("NonFinite", e.what(), e.last_valid_time);
        return 3;
    } catch (const EvaluationDomain& e) {
        emit_error("EvaluationDomain", e.what());
        return 3;
    } catch (const DomainViolation& e) {
        emit_error("DomainViolation", e.what());
        return 3;
    } catch (const NegativeProduct& e) {
        emit_error("NegativeProduct", e.what());
        return 3;
    } catch (const SingularMatrix& e) {
        emit_error("SingularMatrix", e.what());
        return 3;
    } catch (const Unsupported& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        emit_error("Error", e.what());
        return 3;
    }
}
