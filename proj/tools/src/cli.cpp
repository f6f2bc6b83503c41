/*
   Copyright 2026 The bhnoma Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include "bhnoma/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bhnoma/analytics.hpp"
#include "bhnoma/baselines.hpp"
#include "bhnoma/errors.hpp"
#include "bhnoma/montecarlo.hpp"
#include "bhnoma/report.hpp"
#include "bhnoma/scenario.hpp"
#include "bhnoma/units.hpp"

namespace bhnoma::cli {
namespace {

const std::vector<std::string> kOutageColumns = {
    "rho_db",       "variant",      "csi",         "kappa",       "analytic_n", "analytic_m",
    "asymptotic_n", "asymptotic_m", "empirical_n", "empirical_m", "trials"};
const std::vector<std::string> kCompareColumns = {"demand_mbps", "scheduler", "mean_objective",
                                                  "feasible_runs", "seeds", "rank"};
const std::vector<std::string> kPavgColumns = {"state", "weight", "half_width"};

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& cols) {
    std::string s;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) s += ',';
        s += cols[i];
    }
    return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!line.empty() && line.back() == sep) parts.emplace_back();
    return parts;
}

bool parse_double(const std::string& s, double& v) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

void write_provenance(std::ostream& os, const std::string& command, std::uint64_t hash,
                      std::uint64_t seed) {
    os << "# tool=bhnoma " << kToolVersion << '\n';
    os << "# command=" << command << '\n';
    os << "# scenario_hash=" << hash << '\n';
    os << "# seed=" << seed << '\n';
}

/// Holds either the --out file or the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ParseError("cannot open output file '" + path + "'");
            os_ = file_.get();
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

ScenarioConfig scenario_or_default(const std::string& path) {
    if (path.empty()) {
        ScenarioConfig cfg;
        validate(cfg);
        return cfg;
    }
    return load_scenario(path);
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    const auto parts = split(text, ',');
    double a = 0.0, b = 0.0;
    if (parts.size() != 2 || !parse_double(parts[0], a) || !parse_double(parts[1], b)) {
        throw ParseError(std::string(what) + " expects two comma-separated numbers, got '" + text +
                         "'");
    }
    return {a, b};
}

struct OptimizeArgs {
    std::string scenario;
    std::string scheduler = "unoma";
    std::string reuse;
    std::uint64_t seed = 0;
    std::string out;
    bool omit_wall_clock = false;
};

int cmd_optimize(const OptimizeArgs& a, std::ostream& out, std::ostream& err) {
    ScenarioConfig cfg = load_scenario(a.scenario);
    if (!a.reuse.empty()) cfg.reuse_mode = parse_reuse_mode(a.reuse);
    const SchedulerKind kind = parse_scheduler_kind(a.scheduler);
    const RunReport report = run_scheduler(cfg, kind, a.seed);
    Sink sink(a.out, out);
    sink.stream() << report_to_json(report, !a.omit_wall_clock) << '\n';
    if (!report.feasible) {
        err << "infeasible: " << report.min_rate_failures.size()
            << " users below the minimum rate\n";
        return kExitInfeasible;
    }
    return kExitOk;
}

struct OutageArgs {
    std::string scenario;
    std::string snr_range = "0:40:2";
    std::string variant = "cd";
    std::string csi = "ipcsi";
    double kappa = 0.2;
    long long trials = 1'000'000;
    int pavg_trials = 100'000;
    std::uint64_t seed = 0;
    std::string out;
    double omega = 0.1;
    int K = 4;
    double inr_db = 10.0;
    std::string power_split = "0.26,0.74";
    std::string rates = "1,1.5";
    bool raw_theorem = false;
};

NomaVariant parse_variant(const std::string& s) {
    if (s == "cd" || s == "code") return NomaVariant::CodeDomain;
    if (s == "pd" || s == "power") return NomaVariant::PowerDomain;
    throw ParseError("--variant must be cd or pd, got '" + s + "'");
}

CsiMode parse_csi(const std::string& s) {
    if (s == "ipcsi" || s == "imperfect") return CsiMode::Imperfect;
    if (s == "pcsi" || s == "perfect") return CsiMode::Perfect;
    throw ParseError("--csi must be ipcsi or pcsi, got '" + s + "'");
}

int cmd_outage(const OutageArgs& a, std::ostream& out) {
    const std::vector<double> grid = parse_range(a.snr_range);
    if (grid.empty()) throw ParseError("--snr-range '" + a.snr_range + "' is empty or malformed");
    if (a.kappa < 0.0 || a.kappa > 1.0) throw ParseError("--kappa must lie in [0, 1]");
    if (a.trials < 0) throw ParseError("--trials must be non-negative");
    const ScenarioConfig cfg = scenario_or_default(a.scenario);
    const NomaVariant variant = parse_variant(a.variant);
    const CsiMode csi = parse_csi(a.csi);
    const auto [a_n, a_m] = parse_pair(a.power_split, "--power-split");
    const auto [r_n, r_m] = parse_pair(a.rates, "--rates");

    const InterferenceWeightSet weights =
        a.kappa > 0.0 ? p_avg_overlap(cfg, a.kappa, a.pavg_trials, a.seed)
                      : InterferenceWeightSet::interference_free();

    Sink sink(a.out, out);
    std::ostream& os = sink.stream();
    write_provenance(os, "outage", scenario_hash(cfg), a.seed);
    os << join(kOutageColumns) << '\n';
    const std::string vname = variant == NomaVariant::CodeDomain ? "cd" : "pd";
    const std::string cname = csi == CsiMode::Imperfect ? "ipcsi" : "pcsi";
    for (double db : grid) {
        OutageParams p;
        p.rho = db_to_linear(db);
        p.omega = a.omega;
        p.a_n = a_n;
        p.a_m = a_m;
        p.eps_n = sinr_threshold(r_n);
        p.eps_m = sinr_threshold(r_m);
        p.K = a.K;
        p.inr = db_to_linear(a.inr_db);
        const OutageValue vn = outage_user_n(p, variant, csi, weights, a.raw_theorem);
        const OutageValue vm = outage_user_m(p, variant, csi, weights, a.raw_theorem);
        const double an = asymptotic_outage(p, PairUser::N, variant, csi, weights, a.raw_theorem);
        const double am = asymptotic_outage(p, PairUser::M, variant, csi, weights, a.raw_theorem);
        std::string en, em;
        if (a.trials > 0) {
            const TrialBatch batch = simulate_outage(p, variant, csi, weights, a.trials, a.seed);
            en = num(batch.p_n());
            em = num(batch.p_m());
        }
        os << num(db) << ',' << vname << ',' << cname << ',' << num(a.kappa) << ','
           << num(vn.probability) << ',' << num(vm.probability) << ',' << num(an) << ','
           << num(am) << ',' << en << ',' << em << ',' << a.trials << '\n';
    }
    return kExitOk;
}

struct CompareArgs {
    std::string scenario;
    std::string demand_sweep = "300:600:50";
    int seeds = 10;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    const std::vector<double> levels = parse_range(a.demand_sweep);
    if (levels.empty()) {
        throw ParseError("--demand-sweep '" + a.demand_sweep + "' is empty or malformed");
    }
    if (a.seeds < 1) throw ParseError("--seeds must be at least 1");
    const ScenarioConfig base = scenario_or_default(a.scenario);
    const std::vector<SchedulerKind> kinds = {SchedulerKind::UNoma, SchedulerKind::Oma,
                                              SchedulerKind::MaxSinr, SchedulerKind::Periodic};

    Sink sink(a.out, out);
    std::ostream& os = sink.stream();
    write_provenance(os, "compare", scenario_hash(base), a.seed);
    os << join(kCompareColumns) << '\n';
    for (double mbps : levels) {
        ScenarioConfig cfg = base;
        // Same spread around the mean as the default 200-1400 Mbps range.
        cfg.demand_min = 0.25 * mbps * 1e6;
        cfg.demand_max = 1.75 * mbps * 1e6;
        validate(cfg);
        std::vector<double> mean(kinds.size(), 0.0);
        std::vector<int> feasible(kinds.size(), 0);
        for (int s = 0; s < a.seeds; ++s) {
            for (std::size_t k = 0; k < kinds.size(); ++k) {
                const RunReport r = run_scheduler(cfg, kinds[k], a.seed + s);
                mean[k] += r.objective / a.seeds;
                feasible[k] += r.feasible ? 1 : 0;
            }
        }
        std::vector<std::size_t> order(kinds.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return mean[x] < mean[y]; });
        std::vector<int> rank(kinds.size());
        for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i) + 1;
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            os << num(mbps) << ',' << to_string(kinds[k]) << ',' << num(mean[k]) << ','
               << feasible[k] << ',' << a.seeds << ',' << rank[k] << '\n';
        }
    }
    return kExitOk;
}

struct PavgArgs {
    std::string scenario;
    double kappa = 0.2;
    int trials = 100'000;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_pavg(const PavgArgs& a, std::ostream& out) {
    if (a.kappa < 0.0 || a.kappa > 1.0) throw ParseError("--kappa must lie in [0, 1]");
    if (a.trials < 1) throw ParseError("--trials must be at least 1");
    const ScenarioConfig cfg = scenario_or_default(a.scenario);
    const InterferenceWeightSet w = p_avg_overlap(cfg, a.kappa, a.trials, a.seed);
    Sink sink(a.out, out);
    std::ostream& os = sink.stream();
    write_provenance(os, "pavg", scenario_hash(cfg), a.seed);
    os << "# kappa=" << num(a.kappa) << '\n';
    os << "# trials=" << a.trials << '\n';
    os << join(kPavgColumns) << '\n';
    for (std::size_t j = 0; j < w.weights.size(); ++j) {
        os << j << ',' << num(w.weights[j]) << ',' << num(w.half_width[j]) << '\n';
    }
    return kExitOk;
}

std::string check_csv(std::istream& in) {
    std::string line;
    std::vector<std::string> header;
    int line_no = 0;
    bool saw_tool = false;
    bool saw_hash = false;
    bool saw_seed = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.rfind("# ", 0) == 0) {
            saw_tool |= line.rfind("# tool=", 0) == 0;
            saw_hash |= line.rfind("# scenario_hash=", 0) == 0;
            saw_seed |= line.rfind("# seed=", 0) == 0;
            continue;
        }
        header = split(line, ',');
        break;
    }
    if (!saw_tool || !saw_hash || !saw_seed) return "missing provenance header lines";
    std::vector<bool> numeric;
    std::vector<bool> optional;
    if (header == kOutageColumns) {
        numeric = {true, false, false, true, true, true, true, true, true, true, true};
        optional = {false, false, false, false, false, false, false, false, true, true, false};
    } else if (header == kCompareColumns) {
        numeric = {true, false, true, true, true, true};
        optional.assign(numeric.size(), false);
    } else if (header == kPavgColumns) {
        numeric = {true, true, true};
        optional.assign(numeric.size(), false);
    } else {
        return "unrecognised column header at line " + std::to_string(line_no);
    }
    int rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            return "line " + std::to_string(line_no) + ": expected " +
                   std::to_string(header.size()) + " columns";
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v = 0.0;
            if (cells[c].empty() && optional[c]) continue;
            if (cells[c].empty()) return "line " + std::to_string(line_no) + ": empty " + header[c];
            if (numeric[c] && !parse_double(cells[c], v)) {
                return "line " + std::to_string(line_no) + ": " + header[c] + " is not a number";
            }
        }
        ++rows;
    }
    if (rows == 0) return "no data rows";
    return {};
}

}  // namespace

std::uint64_t default_seed() {
    if (const char* env = std::getenv("BHNOMA_SEED")) {
        std::uint64_t v = 0;
        const std::string s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
    }
    return 1;
}

std::vector<double> parse_range(const std::string& text) {
    const auto parts = split(text, ':');
    double lo = 0.0, hi = 0.0, step = 0.0;
    if (parts.size() != 3 || !parse_double(parts[0], lo) || !parse_double(parts[1], hi) ||
        !parse_double(parts[2], step)) {
        return {};
    }
    if (!(step > 0.0) || hi < lo || !std::isfinite(lo) || !std::isfinite(hi)) return {};
    const long long n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) grid.push_back(lo + static_cast<double>(i) * step);
    return grid;
}

std::string check_output_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "cannot open '" + path + "'";
    const int first = in.peek();
    if (first == '{') {
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            const RunReport r = report_from_json(buf.str());
            const double again = recomputed_objective(r);
            if (std::abs(again - r.objective) > 1e-9 * std::max(1.0, std::abs(again))) {
                return "objective does not match the stored demand and capacity vectors";
            }
        } catch (const Error& e) {
            return e.what();
        }
        return {};
    }
    return check_csv(in);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Beam-hopping NOMA resource allocation and outage analysis", "bhnoma"};
    app.set_version_flag("--version", std::string("bhnoma ") + kToolVersion);
    app.require_subcommand(0, 1);

    std::string check_path;
    app.add_option("--check", check_path, "Validate a report or CSV file written by this tool");

    const std::uint64_t seed0 = default_seed();

    OptimizeArgs opt;
    opt.seed = seed0;
    auto* optimize = app.add_subcommand("optimize", "Run one scheduler over a scenario window");
    optimize->add_option("--scenario", opt.scenario, "Scenario file")->required();
    optimize->add_option("--scheduler", opt.scheduler, "unoma | oma | maxsinr | periodic");
    optimize->add_option("--reuse", opt.reuse, "Override the scenario reuse mode: 1c | 2c | 4c");
    optimize->add_option("--seed", opt.seed, "Master seed (default: BHNOMA_SEED or 1)");
    optimize->add_option("--out", opt.out, "Report path (default: stdout)");
    optimize->add_flag("--omit-wall-clock", opt.omit_wall_clock,
                       "Leave wall-clock time out of the report");

    OutageArgs oa;
    oa.seed = seed0;
    auto* outage = app.add_subcommand("outage", "Outage probability sweep over SNR");
    outage->add_option("--scenario", oa.scenario, "Scenario file (B and B0 cap co-active beams)");
    outage->add_option("--snr-range", oa.snr_range, "lo:hi:step in dB");
    outage->add_option("--variant", oa.variant, "cd | pd");
    outage->add_option("--csi", oa.csi, "ipcsi | pcsi");
    outage->add_option("--kappa", oa.kappa, "Slot-overlap fraction");
    outage->add_option("--trials", oa.trials, "Monte Carlo trials per grid point (0: analytic only)");
    outage->add_option("--pavg-trials", oa.pavg_trials, "Trials for the interference-state weights");
    outage->add_option("--seed", oa.seed, "Master seed (default: BHNOMA_SEED or 1)");
    outage->add_option("--out", oa.out, "CSV path (default: stdout)");
    outage->add_option("--omega", oa.omega, "Channel estimation error variance");
    outage->add_option("--K", oa.K, "Subcarriers per pair for the code-domain variant");
    outage->add_option("--inr-db", oa.inr_db, "INR of one co-active interfering beam, dB");
    outage->add_option("--power-split", oa.power_split, "a_n,a_m");
    outage->add_option("--rates", oa.rates, "R_n,R_m in bit/s/Hz");
    outage->add_flag("--raw-theorem", oa.raw_theorem, "Evaluate the printed closed forms as stated");

    CompareArgs ca;
    ca.seed = seed0;
    auto* compare = app.add_subcommand("compare", "Mean objective of every scheduler per demand");
    compare->add_option("--scenario", ca.scenario, "Scenario file (default: built-in defaults)");
    compare->add_option("--demand-sweep", ca.demand_sweep, "lo:hi:step mean demand in Mbps");
    compare->add_option("--seeds", ca.seeds, "Paired seeds per demand level");
    compare->add_option("--seed", ca.seed, "First seed (default: BHNOMA_SEED or 1)");
    compare->add_option("--out", ca.out, "CSV path (default: stdout)");

    PavgArgs pa;
    pa.seed = seed0;
    auto* pavg = app.add_subcommand("pavg", "Interference-state weights for a slot-overlap fraction");
    pavg->add_option("--scenario", pa.scenario, "Scenario file (default: built-in defaults)");
    pavg->add_option("--kappa", pa.kappa, "Slot-overlap fraction");
    pavg->add_option("--trials", pa.trials, "Monte Carlo trials");
    pavg->add_option("--seed", pa.seed, "Master seed (default: BHNOMA_SEED or 1)");
    pavg->add_option("--out", pa.out, "CSV path (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (!check_path.empty()) {
            const std::string problem = check_output_file(check_path);
            if (!problem.empty()) {
                err << "check failed: " << problem << '\n';
                return kExitInputError;
            }
            out << "ok\n";
            return kExitOk;
        }
        if (optimize->parsed()) return cmd_optimize(opt, out, err);
        if (outage->parsed()) return cmd_outage(oa, out);
        if (compare->parsed()) return cmd_compare(ca, out);
        if (pavg->parsed()) return cmd_pavg(pa, out);
        out << app.help();
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

}  // namespace bhnoma::cli
