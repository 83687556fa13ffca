// Copyright 2026 The router_sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end: run built-in scenarios, simulate .circuit files and
// sweep parameters. Exit codes: 0 success, 2 assertion failure, 3 usage error,
// 4 parse or compile error.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "router_sim/circuit_dsl.hpp"
#include "router_sim/report.hpp"
#include "router_sim/scenarios.hpp"

namespace {

using namespace router_sim;

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 2;
constexpr int kExitUsage = 3;
constexpr int kExitParse = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Grid {
    double lo = 0.0, hi = 0.0;
    int n = 0;

    double at(int k) const {
        return n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    }
};

Grid parse_grid(const std::string &spec) {
    Grid g;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    const bool ok = static_cast<bool>(in >> g.lo >> c1 >> g.hi >> c2 >> g.n) && c1 == ':' && c2 == ':';
    if (!ok || !(in >> std::ws).eof()) {
        throw UsageError("grid must be written lo:hi:n, got '" + spec + "'");
    }
    if (g.n <= 0) throw UsageError("grid is empty");
    return g;
}

Complex parse_complex(const std::string &s) {
    auto w = dsl::detail::parse_weight(s);
    if (!w) throw UsageError("not a complex number: '" + s + "'");
    return *w;
}

double default_tolerance() {
    if (const char *env = std::getenv("ROUTER_SIM_TOL")) {
        auto v = dsl::detail::parse_real(env);
        if (!v || *v <= 0.0) throw UsageError("ROUTER_SIM_TOL must be a positive real");
        return *v;
    }
    return 1e-9;
}

std::string scenario_names() {
    std::string out;
    for (const auto &e : scenario_registry()) out += (out.empty() ? "" : ", ") + e.name;
    return out;
}

const ScenarioEntry &require_scenario(const std::string &name) {
    const ScenarioEntry *e = find_scenario(name);
    if (!e) throw UsageError("unknown scenario '" + name + "'; valid names: " + scenario_names());
    return *e;
}

struct CommonOptions {
    std::string alphas = "equal";
    std::string alpha1, alpha2;
    unsigned long long seed = 1;
    std::string perturbation;
    std::string format = "json";
    std::optional<double> tol;
    bool decomposed = false;
    std::optional<double> theta12, theta23;
};

ScenarioOptions scenario_options(const ScenarioEntry &e, const CommonOptions &c) {
    ScenarioOptions o;
    o.perturbation = c.perturbation;
    o.model = c.decomposed ? RouterModel::Decomposed : RouterModel::Ideal;
    if (c.theta12) o.theta12 = *c.theta12;
    if (c.theta23) o.theta23 = *c.theta23;
    if (!c.alpha1.empty() || !c.alpha2.empty()) {
        if (e.alpha_count != 2) throw UsageError("--alpha1/--alpha2 apply to two-beam scenarios");
        o.alphas = {parse_complex(c.alpha1.empty() ? "0" : c.alpha1), parse_complex(c.alpha2.empty() ? "0" : c.alpha2)};
    } else if (c.alphas == "equal") {
        o.alphas.clear();
    } else if (c.alphas == "random") {
        std::mt19937_64 rng(c.seed);
        o.alphas = random_alphas(e.alpha_count, rng);
    } else {
        std::stringstream in(c.alphas);
        std::string item;
        while (std::getline(in, item, ',')) o.alphas.push_back(parse_complex(item));
    }
    return o;
}

void emit(const std::vector<ScenarioResult> &rs, const std::string &format, bool sweep) {
    if (!sweep) {
        std::cout << (format == "csv" ? render_csv(rs.front()) : render_json(rs.front()));
    } else {
        std::cout << (format == "csv" ? render_sweep_csv(rs) : render_sweep_json(rs));
    }
}

int report_claims(const std::vector<ScenarioResult> &rs, double tol) {
    int status = kExitOk;
    for (std::size_t k = 0; k < rs.size(); ++k) {
        for (const auto &label : failed_claims(rs[k], tol)) {
            std::cerr << "assertion failed: " << rs[k].name << (rs.size() > 1 ? " point " + std::to_string(k) : "") << " "
                      << label << " beyond tolerance " << tol << "\n";
            status = kExitAssertion;
        }
    }
    return status;
}

std::vector<ScenarioResult> run_parallel(const ScenarioEntry &e, const std::vector<ScenarioOptions> &points,
                                         unsigned threads) {
    std::vector<std::optional<ScenarioResult>> slots(points.size());
    std::vector<std::string> errors(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < points.size(); k = next++) {
            try {
                slots[k] = e.run(points[k]);
            } catch (const std::exception &ex) {
                errors[k] = ex.what();
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
    std::vector<ScenarioResult> out;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (!slots[k]) throw UsageError("grid point " + std::to_string(k) + ": " + errors[k]);
        out.push_back(std::move(*slots[k]));
    }
    return out;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void add_common(CLI::App *cmd, CommonOptions &c, bool scenario) {
    if (scenario) {
        cmd->add_option("--alphas", c.alphas, "equal, random, or a comma-separated list of a+bi weights");
        cmd->add_option("--alpha1", c.alpha1, "first coefficient of a two-beam scenario");
        cmd->add_option("--alpha2", c.alpha2, "second coefficient of a two-beam scenario");
        cmd->add_option("--seed", c.seed, "seed for --alphas random");
        cmd->add_option("--perturb", c.perturbation, "named perturbation of the scenario (see list)");
        cmd->add_option("--theta12", c.theta12, "shutter tunneling angle between t1 and t2");
        cmd->add_option("--theta23", c.theta23, "shutter tunneling angle between t2 and t3");
    }
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--tol", c.tol, "assertion tolerance (default 1e-9 or ROUTER_SIM_TOL)");
    cmd->add_flag("--decomposed-routers", c.decomposed, "use the beamsplitter and NS-gate router network");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Exact Fock-space simulation of photonic router networks"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string target;
    std::string alpha1_range, theta_range;
    int random_points = 0;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());

    CLI::App *run = app.add_subcommand("run", "run a built-in scenario");
    run->add_option("scenario", target, "scenario name")->required();
    add_common(run, common, true);

    CLI::App *sim = app.add_subcommand("simulate", "simulate a .circuit file");
    sim->add_option("file", target, "circuit file")->required();
    add_common(sim, common, false);

    CLI::App *sweep = app.add_subcommand("sweep", "evaluate a scenario over a parameter grid");
    sweep->add_option("scenario", target, "scenario name")->required();
    add_common(sweep, common, true);
    auto *a1 = sweep->add_option("--alpha1-range", alpha1_range, "real first coefficient over lo:hi:n");
    auto *rnd = sweep->add_option("--random", random_points, "number of random coefficient vectors");
    auto *th = sweep->add_option("--theta-range", theta_range, "both tunneling angles over lo:hi:n");
    a1->excludes(rnd)->excludes(th);
    rnd->excludes(th);
    sweep->add_option("--threads", threads, "worker threads");

    app.add_subcommand("list", "list scenarios and perturbations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const double tol = common.tol ? *common.tol : default_tolerance();
        if (!(tol > 0.0)) throw UsageError("--tol must be positive");

        if (app.got_subcommand("list")) {
            for (const auto &e : scenario_registry()) {
                std::cout << e.name << " (" << e.alpha_count << " coefficients)";
                for (const auto &p : e.perturbations) std::cout << " --perturb " << p;
                std::cout << "\n";
            }
            return kExitOk;
        }

        if (app.got_subcommand("simulate")) {
            dsl::CompileOptions opts;
            opts.router_model = common.decomposed ? RouterModel::Decomposed : RouterModel::Ideal;
            const std::string text = read_file(target);
            try {
                const dsl::CircuitDoc doc = dsl::parse(text);
                for (const auto &w : doc.warnings) std::cerr << target << ": warning: " << w << "\n";
                const Circuit c = dsl::compile(doc, opts);
                emit({circuit_result(target, c)}, common.format, false);
            } catch (const dsl::ParseError &e) {
                std::cerr << target << ": " << e.what() << "\n";
                return kExitParse;
            } catch (const dsl::CompileError &e) {
                std::cerr << target << ": " << e.what() << "\n";
                return kExitParse;
            }
            return kExitOk;
        }

        const ScenarioEntry &entry = require_scenario(target);
        if (app.got_subcommand("run")) {
            const ScenarioResult r = entry.run(scenario_options(entry, common));
            emit({r}, common.format, false);
            return report_claims({r}, tol);
        }

        std::vector<ScenarioOptions> points;
        ScenarioOptions base = scenario_options(entry, common);
        if (!alpha1_range.empty()) {
            const Grid g = parse_grid(alpha1_range);
            if (entry.alpha_count < 2) throw UsageError("scenario has a single coefficient");
            for (int k = 0; k < g.n; ++k) {
                const double x = g.at(k);
                if (std::abs(x) > 1.0) throw UsageError("alpha1 grid leaves [-1, 1]");
                ScenarioOptions o = base;
                const double rest = std::sqrt((1.0 - x * x) / static_cast<double>(entry.alpha_count - 1));
                o.alphas.assign(entry.alpha_count, Complex{rest, 0.0});
                o.alphas[0] = x;
                points.push_back(std::move(o));
            }
        } else if (sweep->count("--random")) {
            if (random_points <= 0) throw UsageError("grid is empty");
            std::mt19937_64 rng(common.seed);
            for (int k = 0; k < random_points; ++k) {
                ScenarioOptions o = base;
                o.alphas = random_alphas(entry.alpha_count, rng);
                points.push_back(std::move(o));
            }
        } else if (!theta_range.empty()) {
            const Grid g = parse_grid(theta_range);
            for (int k = 0; k < g.n; ++k) {
                ScenarioOptions o = base;
                o.theta12 = o.theta23 = g.at(k);
                points.push_back(std::move(o));
            }
        } else {
            throw UsageError("sweep needs --alpha1-range, --random or --theta-range");
        }
        const auto results = run_parallel(entry, points, threads);
        emit(results, common.format, true);
        // Coefficient sweeps assert the scenario claims; theta sweeps only report.
        return theta_range.empty() ? report_claims(results, tol) : kExitOk;
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
