#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "htpa/htpa.hpp"

using namespace htpa;
using json = nlohmann::ordered_json;

namespace {

const ModelParams kCanonical{0.3, 0.5, 0.2, 1.0, 1.0};

struct Common {
    std::string params_file;
    std::optional<double> alpha, beta, gamma, delta_in, delta_out;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
    double quad_tol = 1e-12;
    std::string out;

    ModelParams params() const {
        ModelParams p = params_file.empty() ? kCanonical : load_params(params_file);
        if (alpha) p.alpha = *alpha;
        if (beta) p.beta = *beta;
        if (gamma) p.gamma = *gamma;
        if (delta_in) p.delta_in = *delta_in;
        if (delta_out) p.delta_out = *delta_out;
        return validate(p);
    }

    QuadratureSpec quad() const { return {quad_tol, quad_tol, 10000}; }

    unsigned worker_count() const { return threads == 0 ? default_threads() : threads; }
};

void add_model_options(CLI::App* app, Common& c) {
    app->add_option("--params", c.params_file, "key=value parameter file (default: alpha=0.3 beta=0.5 gamma=0.2 delta_in=delta_out=1)")
        ->check(CLI::ExistingFile);
    app->add_option("--alpha", c.alpha, "override alpha");
    app->add_option("--beta", c.beta, "override beta");
    app->add_option("--gamma", c.gamma, "override gamma");
    app->add_option("--delta-in", c.delta_in, "override delta_in");
    app->add_option("--delta-out", c.delta_out, "override delta_out");
    app->add_option("--quad-tol", c.quad_tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
}

void add_run_options(CLI::App* app, Common& c, bool seeded) {
    if (seeded) app->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
    app->add_option("--threads", c.threads, "worker threads (0: HEAVYTAIL_PA_THREADS or 1)")
        ->envname("HEAVYTAIL_PA_THREADS");
}

/// Resolved configuration shared by every report.
json config_json(const std::string& command, const Common& c, const ModelParams& p, bool seeded, json options) {
    json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["params_file"] = c.params_file;
    j["params"] = to_json(p);
    if (seeded) j["seed"] = c.seed;
    j["threads"] = c.worker_count();
    j["quad_tol"] = c.quad_tol;
    j["options"] = std::move(options);
    return j;
}

/// CSV metadata: run description plus the command options. The thread
/// count is left out so the file does not depend on it.
Metadata csv_metadata(const std::string& command, const Common& c, const ModelParams& p, bool seeded,
                      const json& options) {
    Metadata m = describe_run(p, seeded ? std::optional<std::uint64_t>(c.seed) : std::nullopt);
    m.set("command", command);
    m.set("quad_tol", c.quad_tol);
    for (const auto& [k, v] : options.items()) m.set(k, v.is_string() ? v.get<std::string>() : v.dump());
    return m;
}

json report_base(const std::string& command, const Common& c, const ModelParams& p, bool seeded, const json& options) {
    json r;
    r["metadata"] = to_json(describe_run(p, seeded ? std::optional<std::uint64_t>(c.seed) : std::nullopt));
    r["config"] = config_json(command, c, p, seeded, options);
    return r;
}

void emit_json(const std::string& path, const json& j) {
    if (path.empty() || path == "-")
        std::cout << j.dump(2) << '\n';
    else
        write_json(path, j);
}

std::string with_replica(const std::string& path, unsigned r, unsigned replicas) {
    if (replicas <= 1) return path;
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    const std::string tag = ".r" + std::to_string(r);
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

// simulate --------------------------------------------------------------

struct SimulateOpts {
    std::uint64_t edges = 0;
    std::string graph_out;
    std::string counts_out = "counts.csv";
    unsigned replicas = 1;
    double max_memory_gb = 16.0;
};

int run_simulate(const Common& c, const SimulateOpts& o) {
    const ModelParams p = c.params();
    json opts{{"edges", o.edges}, {"replicas", o.replicas}, {"max_memory_gb", o.max_memory_gb}};
    const GrowthLimits limits{static_cast<std::uint64_t>(o.max_memory_gb * double(1ULL << 30))};
    parallel_for(o.replicas, c.worker_count(), [&](std::size_t r) {
        Rng rng(c.seed, r);
        DirectedMultigraph g = seed_graph({}, p);
        grow(g, o.edges, p, rng, limits);
        json ropts = opts;
        ropts["replica"] = r;
        Metadata meta = csv_metadata("simulate", c, p, true, ropts);
        meta.set("nodes", std::uint64_t(g.node_count()));
        meta.set("edge_count", std::uint64_t(g.edge_count()));
        if (!o.counts_out.empty())
            write_csv(with_replica(o.counts_out, unsigned(r), o.replicas), counts_csv(degree_counts(g), meta));
        if (!o.graph_out.empty()) write_graph(with_replica(o.graph_out, unsigned(r), o.replicas), g, meta);
    });
    return 0;
}

// analytic-pmf ----------------------------------------------------------

struct PmfOpts {
    std::uint64_t imax = 500, jmax = 500;
    std::string out = "pmf.csv";
};

int run_analytic_pmf(const Common& c, const PmfOpts& o) {
    const ModelParams p = c.params();
    const LimitLaw law(p, c.quad());
    const JointPMF pmf = law.pmf_table(o.imax, o.jmax, c.worker_count());
    Metadata meta = csv_metadata("analytic-pmf", c, p, false, json{{"imax", o.imax}, {"jmax", o.jmax}});
    meta.set("table_mass", pmf.total());
    meta.set("captured_mass", law.captured_mass(std::min(o.imax, o.jmax)));
    write_csv(o.out, pmf_csv(pmf, meta));
    std::cerr << "table mass " << format_double(pmf.total()) << '\n';
    return 0;
}

// sample-limit ----------------------------------------------------------

struct SampleOpts {
    std::uint64_t n = 0;
    std::string out = "samples.csv";
};

int run_sample_limit(const Common& c, const SampleOpts& o) {
    const ModelParams p = c.params();
    const LimitLaw law(p, c.quad());
    const auto draws = law.sample(o.n, c.seed, c.worker_count());
    write_csv(o.out, samples_csv(draws, csv_metadata("sample-limit", c, p, true, json{{"n", o.n}})));
    return 0;
}

// density ---------------------------------------------------------------

struct DensityOpts {
    std::string component = "combined";
    std::vector<std::string> grid;
    std::string out = "density.csv";
};

TailComponent parse_component(const std::string& s) {
    if (s == "1") return TailComponent::one;
    if (s == "2") return TailComponent::two;
    if (s == "combined") return TailComponent::combined;
    throw DomainError("--component must be 1, 2 or combined");
}

int run_density(const Common& c, const DensityOpts& o) {
    const ModelParams p = c.params();
    const TailComponent comp = parse_component(o.component);
    const auto xs = parse_grid(o.grid.at(0)), ys = parse_grid(o.grid.at(1));
    const TailMeasure tm(p, c.quad());
    std::vector<double> f(xs.size() * ys.size()), v(xs.size() * ys.size());
    parallel_for(f.size(), c.worker_count(), [&](std::size_t q) {
        const double x = xs[q / ys.size()], y = ys[q % ys.size()];
        f[q] = tm.density(comp, x, y);
        v[q] = tm.rect_mass(comp, x, y);
    });
    CsvTable t(csv_metadata("density", c, p, false,
                            json{{"component", o.component}, {"xgrid", o.grid[0]}, {"ygrid", o.grid[1]}}),
               {"x", "y", "density", "rect_mass"});
    t.meta().set("branch_probability", tm.branch_probability());
    for (std::size_t q = 0; q < f.size(); ++q) t.add_row({xs[q / ys.size()], ys[q % ys.size()], f[q], v[q]});
    write_csv(o.out, t);
    return 0;
}

// angular ---------------------------------------------------------------

struct AngularOpts {
    std::string samples;
    double quantile = 0.99;
    std::size_t bins = 20;
    std::string out = "angular.csv";
};

int run_angular(const Common& c, const AngularOpts& o) {
    const ModelParams p = c.params();
    const DerivedConstants d = derive(p);
    const auto pairs = samples_from_csv(read_csv(o.samples));
    const StandardizedSample s = standardize(std::span<const DegreePair>(pairs), d);
    const double thr = radius_quantile(s, o.quantile);
    const AngularHistogram h = angular_histogram(s, thr, o.bins);
    CsvTable t(csv_metadata("angular", c, p, false,
                            json{{"samples", o.samples}, {"threshold_quantile", o.quantile}, {"bins", o.bins}}),
               {"angle_lo", "angle_hi", "mass"});
    t.meta().set("standardizing_power", s.c);
    t.meta().set("radius_threshold", thr);
    t.meta().set("exceedances", std::uint64_t(h.exceedances));
    for (std::size_t b = 0; b < h.mass.size(); ++b) t.add_row({h.edges[b], h.edges[b + 1], h.mass[b]});
    write_csv(o.out, t);
    return 0;
}

// estimate --------------------------------------------------------------

struct EstimateOpts {
    std::string counts, samples;
    std::string margin = "in";
    std::string method = "hill";
    std::size_t k = 0;
    std::uint64_t i_min = 10;
    std::optional<std::uint64_t> i_max;
};

int run_estimate(const Common& c, const EstimateOpts& o) {
    const ModelParams p = c.params();
    if (o.counts.empty() == o.samples.empty()) throw DomainError("give exactly one of --counts and --samples");
    const Margin m = o.margin == "in" ? Margin::in : Margin::out;
    JointCountTable table;
    if (!o.counts.empty()) {
        table = counts_from_csv(read_csv(o.counts));
    } else {
        std::vector<CountCell> cells;
        for (const auto& s : samples_from_csv(read_csv(o.samples))) cells.push_back({s.in, s.out, 1});
        table = JointCountTable(std::move(cells));
    }
    TailFit fit;
    double reference = 0.0;
    std::optional<DerivedConstants> d;
    try {
        d = derive(p);
    } catch (const DegenerateTail&) {
    }
    if (o.method == "hill") {
        const auto deg = positive_degrees(table, m);
        fit = hill_estimate(deg, o.k ? o.k : default_hill_k(deg.size()));
        if (d) reference = m == Margin::in ? d->gamma_in() : d->gamma_out();
    } else if (o.method == "loglog") {
        const JointPMF pmf = empirical_pmf(table);
        fit = loglog_slope(m == Margin::in ? pmf.marginal_in() : pmf.marginal_out(), o.i_min, o.i_max);
        if (d) reference = m == Margin::in ? d->alpha_in : d->alpha_out;
    } else {
        throw DomainError("--method must be hill or loglog");
    }
    json opts{{"counts", o.counts}, {"samples", o.samples}, {"margin", o.margin}, {"method", o.method},
              {"k", o.k}, {"i_min", o.i_min}};
    if (o.i_max) opts["i_max"] = *o.i_max;
    json r = report_base("estimate", c, p, false, opts);
    r["method"] = o.method;
    r["margin"] = o.margin;
    r["index_estimate"] = fit.index_estimate;
    r["k_used"] = fit.k_used;
    r["stderr"] = fit.standard_error;
    if (d) r["model_index"] = reference;
    emit_json(c.out, r);
    return 0;
}

// compare ---------------------------------------------------------------

struct CompareOpts {
    std::string counts, pmf;
    std::uint64_t i_max = 10, j_max = 10;
};

int run_compare(const Common& c, const CompareOpts& o) {
    const ModelParams p = c.params();
    const JointPMF emp = empirical_pmf(counts_from_csv(read_csv(o.counts)));
    const JointPMF lim = o.pmf.empty() ? LimitLaw(p, c.quad()).pmf_table(o.i_max, o.j_max, c.worker_count())
                                       : pmf_from_csv(read_csv(o.pmf));
    const PmfComparison cmp = compare_pmf(emp, lim, {0, o.i_max, 0, o.j_max});
    json r = report_base("compare", c, p, false,
                         json{{"counts", o.counts}, {"pmf", o.pmf}, {"i_max", o.i_max}, {"j_max", o.j_max}});
    r["total_variation"] = cmp.total_variation;
    r["max_abs_diff"] = cmp.max_abs_diff;
    json cells = json::array();
    for (const auto& d : cmp.cells) cells.push_back({{"i", d.in}, {"j", d.out}, {"empirical", d.p}, {"limit", d.q}});
    r["cells"] = std::move(cells);
    emit_json(c.out, r);
    return 0;
}

// verify ----------------------------------------------------------------

struct VerifyOpts {
    std::string check = "uhat";
    int k = 3;
    std::string grid;
    std::vector<std::string> lambdas;
    std::vector<double> point{1.0, 1.0};
    std::string y_grid = "0,2,4,8";
    std::string x_grid = "0.5,1,2";
    int axis = 1;
    std::optional<double> tol;
};

json stabilization_json(const StabilizationReport& s) {
    json rows = json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"t", r.t}, {"value", r.value}, {"target", r.target}, {"rel_error", r.rel_error}});
    return {{"rows", rows},
            {"tolerance", s.tolerance},
            {"last_two_rel_change", s.last_two_rel_change},
            {"monotone", s.monotone},
            {"pass", s.pass}};
}

std::vector<double> parse_pair(const std::string& s) {
    const auto v = parse_grid(s);
    if (v.size() != 2) throw FormatError("expected a pair a,b: " + s);
    return v;
}

int run_verify(const Common& c, const VerifyOpts& o) {
    const ModelParams p = c.params();
    DerivativeMeasure U = build_derivative_measure(o.k, p, c.quad());
    U.set_threads(c.worker_count());
    const ScalingFunctions b = U.scaling();
    json opts{{"check", o.check}, {"k", o.k}};
    json body;
    bool pass = true;
    if (o.check == "uhat") {
        const std::string grid = o.grid.empty() ? "1e2,1e4,1e6" : o.grid;
        const std::vector<std::string> lams =
            o.lambdas.empty() ? std::vector<std::string>{"1,1", "0.5,2", "2,0.5"} : o.lambdas;
        const double tol = o.tol.value_or(0.05);
        opts["grid"] = grid;
        opts["lambda"] = lams;
        opts["tol"] = tol;
        json checks = json::array();
        for (const auto& l : lams) {
            const auto lv = parse_pair(l);
            const auto s = uhat_check(U, lv[0], lv[1], parse_grid(grid), tol);
            json e = stabilization_json(s);
            e["lambda"] = lv;
            checks.push_back(e);
            pass = pass && s.pass;
        }
        body["checks"] = checks;
    } else if (o.check == "measure") {
        const std::string grid = o.grid.empty() ? "1e2,1e3,1e4" : o.grid;
        const double tol = o.tol.value_or(0.10);
        opts["grid"] = grid;
        opts["point"] = o.point;
        opts["tol"] = tol;
        const auto s = measure_check(U, o.point.at(0), o.point.at(1), parse_grid(grid), tol);
        body["checks"] = json::array({stabilization_json(s)});
        body["checks"][0]["point"] = o.point;
        pass = s.pass;
    } else if (o.check == "truncation") {
        const std::string grid = o.grid.empty() ? "1e3,1e4,1e5" : o.grid;
        const double tol = o.tol.value_or(0.01);
        opts["grid"] = grid;
        opts["point"] = o.point;
        opts["y_grid"] = o.y_grid;
        opts["tol"] = tol;
        const auto ys = parse_grid(o.y_grid);
        const double y_top = *std::max_element(ys.begin(), ys.end());
        json rows = json::array();
        for (const auto& r : truncation_condition(U, b, o.point.at(0), o.point.at(1), ys, parse_grid(grid))) {
            rows.push_back({{"t", r.t}, {"y", r.y}, {"value", r.value}, {"full", r.full}, {"ratio", r.ratio}});
            if (r.y == y_top && !(r.ratio < tol)) pass = false;
        }
        body["rows"] = rows;
        body["tolerance"] = tol;
    } else if (o.check == "marginal") {
        const std::string grid = o.grid.empty() ? "1e3,1e4,1e5" : o.grid;
        const double tol = o.tol.value_or(0.10);
        opts["grid"] = grid;
        opts["x_grid"] = o.x_grid;
        opts["axis"] = o.axis;
        opts["tol"] = tol;
        const auto ts = parse_grid(grid);
        const double t_top = *std::max_element(ts.begin(), ts.end());
        const double K = o.axis == 1 ? U.marginal_constant() : 1.0;
        json rows = json::array();
        for (const auto& r : marginal_condition(U, o.axis, b, parse_grid(o.x_grid), ts, K)) {
            rows.push_back({{"t", r.t}, {"x", r.x}, {"value", r.value}, {"target", r.target}, {"ratio", r.ratio}});
            if (r.t == t_top && !(std::abs(r.ratio - 1.0) < tol)) pass = false;
        }
        body["rows"] = rows;
        body["constant"] = K;
        body["tolerance"] = tol;
    } else {
        throw DomainError("--check must be uhat, measure, truncation or marginal");
    }
    json r = report_base("verify", c, p, false, opts);
    r["check"] = o.check;
    r["k"] = o.k;
    r["measure"] = U.recipe();
    r["scaling"] = {{"gamma1", b.gamma1}, {"gamma2", b.gamma2}};
    for (auto& [k, v] : body.items()) r[k] = v;
    r["pass"] = pass;
    emit_json(c.out, r);
    std::cerr << o.check << ": " << (pass ? "pass" : "fail") << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heavy-tailed preferential attachment: simulation, limit laws, tail measures, Tauberian checks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common c;
    SimulateOpts sim;
    PmfOpts pmf;
    SampleOpts smp;
    DensityOpts den;
    AngularOpts ang;
    EstimateOpts est;
    CompareOpts cmp;
    VerifyOpts ver;

    auto* s_sim = app.add_subcommand("simulate", "grow the random graph and write its degree census");
    add_model_options(s_sim, c);
    add_run_options(s_sim, c, true);
    s_sim->add_option("--edges", sim.edges, "edge count n")->required();
    s_sim->add_option("--out", sim.graph_out, "binary graph file");
    s_sim->add_option("--counts", sim.counts_out, "degree census csv (i,j,N_ij)")->capture_default_str();
    s_sim->add_option("--replicas", sim.replicas, "independent replicas; replica r uses stream r")
        ->check(CLI::PositiveNumber);
    s_sim->add_option("--max-memory-gb", sim.max_memory_gb, "memory budget for one graph")->capture_default_str();

    auto* s_pmf = app.add_subcommand("analytic-pmf", "tabulate the limiting joint pmf of (I, O)");
    add_model_options(s_pmf, c);
    add_run_options(s_pmf, c, false);
    s_pmf->add_option("--imax", pmf.imax, "largest in-degree")->capture_default_str();
    s_pmf->add_option("--jmax", pmf.jmax, "largest out-degree")->capture_default_str();
    s_pmf->add_option("--out", pmf.out, "output csv (i,j,p)")->capture_default_str();

    auto* s_smp = app.add_subcommand("sample-limit", "draw i.i.d. pairs from the limiting law");
    add_model_options(s_smp, c);
    add_run_options(s_smp, c, true);
    s_smp->add_option("--n", smp.n, "number of draws")->required();
    s_smp->add_option("--out", smp.out, "output csv (I,O)")->capture_default_str();

    auto* s_den = app.add_subcommand("density", "tail-measure density and rectangle mass on a grid");
    add_model_options(s_den, c);
    add_run_options(s_den, c, false);
    s_den->add_option("--component", den.component, "1, 2 or combined")->capture_default_str();
    s_den->add_option("--grid", den.grid, "x grid and y grid: list a,b,c or range lo:hi:n[:lin]")
        ->expected(2)
        ->required();
    s_den->add_option("--out", den.out, "output csv")->capture_default_str();

    auto* s_ang = app.add_subcommand("angular", "angular histogram of large standardized pairs");
    add_model_options(s_ang, c);
    add_run_options(s_ang, c, false);
    s_ang->add_option("--samples", ang.samples, "samples csv (I,O)")->required()->check(CLI::ExistingFile);
    s_ang->add_option("--threshold-quantile", ang.quantile, "radius quantile used as threshold")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    s_ang->add_option("--bins", ang.bins, "histogram bins")->capture_default_str();
    s_ang->add_option("--out", ang.out, "output csv")->capture_default_str();

    auto* s_est = app.add_subcommand("estimate", "tail index of a degree margin");
    add_model_options(s_est, c);
    add_run_options(s_est, c, false);
    s_est->add_option("--counts", est.counts, "degree census csv")->check(CLI::ExistingFile);
    s_est->add_option("--samples", est.samples, "samples csv")->check(CLI::ExistingFile);
    s_est->add_option("--margin", est.margin, "in or out")
        ->capture_default_str()
        ->check(CLI::IsMember({"in", "out"}));
    s_est->add_option("--method", est.method, "hill or loglog")
        ->capture_default_str()
        ->check(CLI::IsMember({"hill", "loglog"}));
    s_est->add_option("--k", est.k, "order statistics for hill (default floor(sqrt(n)))");
    s_est->add_option("--i-min", est.i_min, "smallest degree in the log-log fit")->capture_default_str();
    s_est->add_option("--i-max", est.i_max, "largest degree in the log-log fit");
    s_est->add_option("--out", c.out, "report json (default stdout)");

    auto* s_cmp = app.add_subcommand("compare", "total variation between a census and the limiting pmf");
    add_model_options(s_cmp, c);
    add_run_options(s_cmp, c, false);
    s_cmp->add_option("--counts", cmp.counts, "degree census csv")->required()->check(CLI::ExistingFile);
    s_cmp->add_option("--pmf", cmp.pmf, "pmf csv (default: computed from the parameters)")
        ->check(CLI::ExistingFile);
    s_cmp->add_option("--imax", cmp.i_max, "region 0..imax in i")->capture_default_str();
    s_cmp->add_option("--jmax", cmp.j_max, "region 0..jmax in j")->capture_default_str();
    s_cmp->add_option("--out", c.out, "report json (default stdout)");

    auto* s_ver = app.add_subcommand("verify", "two-decade stabilization checks on the derivative measure");
    add_model_options(s_ver, c);
    add_run_options(s_ver, c, false);
    s_ver->add_option("--check", ver.check, "uhat, measure, truncation or marginal")
        ->capture_default_str()
        ->check(CLI::IsMember({"uhat", "measure", "truncation", "marginal"}));
    s_ver->add_option("--k", ver.k, "derivative order")->capture_default_str();
    s_ver->add_option("--grid", ver.grid, "t grid (uhat: 1e2,1e4,1e6; measure: 1e2,1e3,1e4; others: 1e3,1e4,1e5)");
    s_ver->add_option("--lambda", ver.lambdas, "uhat rate pair l1,l2 (repeatable)");
    s_ver->add_option("--point", ver.point, "measure corner or truncation kernel scale x1 x2")->expected(2);
    s_ver->add_option("--y-grid", ver.y_grid, "truncation levels")->capture_default_str();
    s_ver->add_option("--x-grid", ver.x_grid, "marginal points")->capture_default_str();
    s_ver->add_option("--axis", ver.axis, "marginal axis")->capture_default_str()->check(CLI::IsMember({1, 2}));
    s_ver->add_option("--tol", ver.tol, "pass tolerance");
    s_ver->add_option("--out", c.out, "report json (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (s_sim->parsed()) return run_simulate(c, sim);
        if (s_pmf->parsed()) return run_analytic_pmf(c, pmf);
        if (s_smp->parsed()) return run_sample_limit(c, smp);
        if (s_den->parsed()) return run_density(c, den);
        if (s_ang->parsed()) return run_angular(c, ang);
        if (s_est->parsed()) return run_estimate(c, est);
        if (s_cmp->parsed()) return run_compare(c, cmp);
        if (s_ver->parsed()) return run_verify(c, ver);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
