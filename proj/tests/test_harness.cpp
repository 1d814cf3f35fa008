// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "vqebo/vqebo.hpp"

using namespace vqebo;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path p = fs::temp_directory_path() / "vqebo_tests" / (std::string(info->test_suite_name()) + "_" + info->name()) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.problem.qubits = 2;
  c.problem.layers = 1;
  c.methods = {Method::nft_seq, Method::nft_rand, Method::emicore};
  c.hyperopt = HyperoptConfig::parse("optim=grid,max_gamma=10,steps=20,interval=5*1+5*100");
  c.acq = AcqParams::parse("func=ei,optim=emicore,pairsize=6,gridsize=8,samplesize=20,smo-steps=2");
  c.n_iter = 8;
  c.seeds = {0, 1, 2};
  c.wall_time = false;
  c.svg = true;
  return c;
}

}  // namespace

TEST(ProblemConfig, TextRoundTrip) {
  ProblemConfig p;
  p.qubits = 5;
  p.layers = 2;
  p.boundary = Boundary::periodic;
  p.entanglement = Entanglement::full;
  p.j = {-1.0, 0.5, 0.25};
  p.h = {0.125, 0.0, -1.0};
  EXPECT_EQ(ProblemConfig::from_text(p.to_text()), p);
  EXPECT_EQ(p.dim(), 2u * 5 + 2u * 2 * 5);
}

TEST(ProblemConfig, RejectsUnknownValues) {
  EXPECT_THROW(ProblemConfig::boundary_from_string("twisted"), std::invalid_argument);
  EXPECT_THROW(ProblemConfig::entanglement_from_string("star"), std::invalid_argument);
  ProblemConfig p;
  p.circuit = "hea";
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Seeds, ParsesRangesAndLists) {
  EXPECT_EQ(parse_seeds("1,2,3"), (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(parse_seeds("0-49").size(), 50u);
  EXPECT_EQ(parse_seeds("0-2,10"), (std::vector<std::uint64_t>{0, 1, 2, 10}));
  EXPECT_TRUE(parse_seeds("").empty());
  EXPECT_THROW(parse_seeds("1,2,1"), std::invalid_argument);
  EXPECT_THROW(parse_seeds("0-3,2"), std::invalid_argument);
  EXPECT_THROW(parse_seeds("5-2"), std::invalid_argument);
  EXPECT_EQ(format_seeds(parse_seeds("0-4,7,9-10")), "0-4,7,9-10");
}

TEST(Methods, Parse) {
  EXPECT_EQ(parse_methods("nft-seq, emicore,bo-ei"),
            (std::vector<Method>{Method::nft_seq, Method::emicore, Method::bo_ei}));
  EXPECT_THROW(parse_methods("nft,cobyla"), std::invalid_argument);
}

TEST(Params, KernelRoundTrip) {
  const auto k = KernelParams::parse("sigma_0=6.0,gamma=3.5");
  EXPECT_DOUBLE_EQ(*k.sigma0, 6.0);
  EXPECT_DOUBLE_EQ(k.gamma, 3.5);
  EXPECT_EQ(KernelParams::parse(k.to_string()), k);
  EXPECT_FALSE(KernelParams::parse("gamma=1").sigma0.has_value());
  EXPECT_THROW(KernelParams::parse("sigma_0=-1"), std::invalid_argument);
  EXPECT_THROW(KernelParams::parse("ell=1"), std::invalid_argument);
}

TEST(Params, AcquisitionRoundTrip) {
  const auto a = AcqParams::parse(
      "func=ei,optim=emicore,pairsize=20,gridsize=100,corethresh=1.0,corethresh_width=10,coremin_scale=2048.0,"
      "corethresh_scale=1.0,samplesize=100,smo-steps=0,smo-axis=True");
  EXPECT_EQ(a.emicore.j_sg, 20);
  EXPECT_EQ(a.emicore.j_og, 100);
  EXPECT_EQ(a.t_ave, 10);
  EXPECT_DOUBLE_EQ(a.c0_scale, 2048.0);
  EXPECT_TRUE(a.sequential_axis);
  EXPECT_EQ(AcqParams::parse(a.to_string()), a);
  EXPECT_THROW(AcqParams::parse("func=ucb"), std::invalid_argument);
  EXPECT_THROW(AcqParams::parse("pairsize=0"), std::invalid_argument);
  EXPECT_THROW(AcqParams::parse("corethresh_width=0"), std::invalid_argument);
}

TEST(Params, DefaultPriorScale) {
  EXPECT_DOUBLE_EQ(default_sigma0(3), 4.0);
  EXPECT_DOUBLE_EQ(default_sigma0(5), 6.0);
  EXPECT_DOUBLE_EQ(default_sigma0(7), 9.0);
}

TEST(Options, NumbersAndTriples) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, -5.9765}) EXPECT_EQ(parse_double(format_double(v)), v);
  const auto t = parse_triple("(-1.0, 0.0, 0.5)");
  EXPECT_EQ(t[0], -1.0);
  EXPECT_EQ(t[2], 0.5);
  EXPECT_EQ(parse_triple(format_triple(t)), t);
  EXPECT_THROW(parse_triple("(1, 2)"), std::invalid_argument);
  EXPECT_THROW(parse_double("1.5x"), std::invalid_argument);
}

TEST(ExperimentConfig, JsonRoundTripAndHash) {
  auto c = small_config();
  c.noise_sq = 0.01;
  c.kernel_params = KernelParams::parse("sigma_0=2,gamma=3");
  const auto back = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.hash(), c.hash());

  auto other = c;
  other.jobs = 8;
  other.svg = false;
  EXPECT_EQ(other.hash(), c.hash());
  other.n_iter += 1;
  EXPECT_NE(other.hash(), c.hash());
}

TEST(ExperimentConfig, Validation) {
  auto c = small_config();
  c.seeds = {3, 3};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.methods.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.jobs = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ExperimentConfig, KernelUsesQubitDefaultPrior) {
  auto c = small_config();
  c.problem.qubits = 5;
  EXPECT_DOUBLE_EQ(c.kernel_config().sigma0_sq, 36.0);
  c.kernel_params.sigma0 = 1.5;
  EXPECT_DOUBLE_EQ(c.kernel_config().sigma0_sq, 2.25);
}

TEST(Cache, PersistsAndReloads) {
  const auto dir = scratch_dir("cache");
  const auto cfg = small_config();
  const auto problem = cfg.problem.problem();
  const auto seeds = parse_seeds("0-49");

  InitialPointCache a(dir, cfg.cache_key(), problem.dim());
  const auto first = a.get(seeds, problem, cfg.observation);
  ASSERT_EQ(first.size(), 50u);
  EXPECT_EQ(a.size(), 50u);
  EXPECT_TRUE(fs::exists(a.path()));
  for (const auto& ip : first) {
    EXPECT_TRUE((ip.x.array() >= 0.0).all() && (ip.x.array() < 2.0 * std::numbers::pi).all());
  }

  InitialPointCache b(dir, cfg.cache_key(), problem.dim());
  const auto again = b.get({7, 3}, problem, cfg.observation);
  EXPECT_EQ(again[0].x, first[7].x);
  EXPECT_EQ(again[0].y, first[7].y);
  EXPECT_EQ(again[1].x, first[3].x);

  // Adding a seed keeps the old entries.
  const auto before = slurp(a.path());
  b.get({100}, problem, cfg.observation);
  EXPECT_EQ(b.size(), 51u);
  EXPECT_NE(slurp(a.path()), before);
}

TEST(Cache, ChangedProblemGetsNewFile) {
  auto cfg = small_config();
  const std::string k2 = cfg.cache_key();
  cfg.problem.qubits = 3;
  const std::string k3 = cfg.cache_key();
  EXPECT_NE(k2, k3);
  const auto dir = scratch_dir("cache");
  EXPECT_NE(InitialPointCache(dir, k2, 6).path(), InitialPointCache(dir, k3, 12).path());
  cfg.observation.n_shots = 256;
  EXPECT_NE(cfg.cache_key(), k3);
}

TEST(Cache, RefusesMismatchedFile) {
  const auto dir = scratch_dir("cache");
  auto cfg = small_config();
  const auto p2 = cfg.problem.problem();
  InitialPointCache a(dir, cfg.cache_key(), p2.dim());
  a.get({0, 1}, p2, cfg.observation);

  cfg.problem.qubits = 3;
  const auto p3 = cfg.problem.problem();
  InitialPointCache b(dir, cfg.cache_key(), p3.dim());
  fs::copy_file(a.path(), b.path(), fs::copy_options::overwrite_existing);
  EXPECT_THROW(b.get({0}, p3, cfg.observation), CacheMismatch);

  InitialPointCache wrong_dim(dir, "anything", p2.dim() + 1);
  EXPECT_THROW(wrong_dim.get({0}, p2, cfg.observation), CacheMismatch);

  std::ofstream(a.path()) << "{ not json";
  InitialPointCache c(dir, ExperimentConfig(small_config()).cache_key(), p2.dim());
  EXPECT_THROW(c.get({0}, p2, cfg.observation), CacheMismatch);
}

TEST(Metrics, SingleQubitGroundState) {
  ProblemConfig pc;
  pc.qubits = 1;
  pc.layers = 0;
  const auto p = pc.problem();
  const auto gs = ground_state(p.hamiltonian);
  Eigen::VectorXd up = Eigen::VectorXd::Zero(2), down = up;
  down(0) = std::numbers::pi;
  const auto a = evaluate_metrics(up, p, &gs), b = evaluate_metrics(down, p, &gs);
  const auto& best = a.energy < b.energy ? a : b;
  EXPECT_NEAR(best.energy, gs.energy, 1e-12);
  EXPECT_NEAR(*best.fidelity, 1.0, 1e-12);
  EXPECT_FALSE(evaluate_metrics(up, p, nullptr).fidelity.has_value());
}

TEST(Metrics, VariationalBound) {
  ProblemConfig pc;
  pc.qubits = 4;
  pc.layers = 2;
  const auto p = pc.problem();
  const auto gs = ground_state(p.hamiltonian);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto m = evaluate_metrics(uniform_point(p.dim(), rng), p, &gs);
    EXPECT_GE(m.energy, gs.energy - 1e-10);
    EXPECT_GE(*m.fidelity, 0.0);
    EXPECT_LE(*m.fidelity, 1.0 + 1e-12);
  }
}

TEST(Aggregate, Percentile) {
  EXPECT_DOUBLE_EQ(percentile({3, 1, 2}, 50), 2.0);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 50), 2.5);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4, 5}, 25), 2.0);
  EXPECT_DOUBLE_EQ(percentile({10, 0}, 75), 7.5);
  EXPECT_DOUBLE_EQ(percentile({4}, 90), 4.0);
  EXPECT_THROW(percentile({}, 50), std::invalid_argument);
}

TEST(Aggregate, TraceInterpolatesAndClamps) {
  const Trace t{{1, 3, 7}, {0, 2, -2}};
  EXPECT_DOUBLE_EQ(t.at(0), 0.0);
  EXPECT_DOUBLE_EQ(t.at(2), 1.0);
  EXPECT_DOUBLE_EQ(t.at(3), 2.0);
  EXPECT_DOUBLE_EQ(t.at(6), -1.0);
  EXPECT_DOUBLE_EQ(t.at(100), -2.0);
}

TEST(Aggregate, SingleRecordIsItsOwnBand) {
  const Trace t{{1, 3, 5}, {5, 4, 1}};
  for (const auto& b : aggregate({t})) {
    EXPECT_EQ(b.median, t.at(b.x));
    EXPECT_EQ(b.q25, b.median);
    EXPECT_EQ(b.q75, b.median);
  }
}

TEST(Aggregate, MedianOfThree) {
  const std::vector<Trace> ts{{{1, 2}, {1, 0}}, {{1, 2}, {3, 0}}, {{1, 2}, {2, 0}}};
  const auto b = aggregate(ts);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_DOUBLE_EQ(b[0].median, 2.0);
  EXPECT_DOUBLE_EQ(b[0].q25, 1.5);
  EXPECT_DOUBLE_EQ(b[0].q75, 2.5);
  EXPECT_THROW(aggregate({}), std::invalid_argument);
}

TEST(Aggregate, PermutationInvariantOnUnionGrid) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Trace> ts;
  for (int k = 0; k < 12; ++k) {
    Trace t;
    double x = 1.0 + k % 3;
    for (int i = 0; i < 8 + k; ++i, x += 1.0 + k % 2) {
      t.x.push_back(x);
      t.y.push_back(u(gen));
    }
    ts.push_back(t);
  }
  const auto ref = aggregate(ts);
  std::set<double> grid;
  for (const auto& t : ts) grid.insert(t.x.begin(), t.x.end());
  EXPECT_EQ(ref.size(), grid.size());
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(ts.begin(), ts.end(), gen);
    const auto b = aggregate(ts);
    ASSERT_EQ(b.size(), ref.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      EXPECT_EQ(b[i].x, ref[i].x);
      EXPECT_EQ(b[i].median, ref[i].median);
      EXPECT_EQ(b[i].q25, ref[i].q25);
      EXPECT_EQ(b[i].q75, ref[i].q75);
    }
  }
}

TEST(Aggregate, QuartilesOfSyntheticExponentials) {
  // 50 records whose value at each checkpoint is Exp(1); analytic quartiles
  // are ln(4/3), ln 2 and ln 4. Sampling sd of a quartile at n=50 is ~0.2.
  std::mt19937_64 gen(11);
  std::exponential_distribution<double> e(1.0);
  std::vector<Trace> ts(50);
  for (auto& t : ts) {
    for (int c = 0; c < 20; ++c) {
      t.x.push_back(c);
      t.y.push_back(e(gen));
    }
  }
  double q25 = 0, med = 0, q75 = 0;
  const auto b = aggregate(ts);
  for (const auto& band : b) {
    q25 += band.q25 / b.size();
    med += band.median / b.size();
    q75 += band.q75 / b.size();
  }
  EXPECT_NEAR(q25, std::log(4.0 / 3.0), 0.05);
  EXPECT_NEAR(med, std::log(2.0), 0.07);
  EXPECT_NEAR(q75, std::log(4.0), 0.12);
}

TEST(Report, CsvRoundTripAndOrdering) {
  std::vector<TrialRecord> recs(2);
  recs[0].method = "nft-seq";
  recs[0].seed = 4;
  recs[0].rows = {{1, -1.5, 0.25, std::nullopt, std::nullopt, 0.0}, {3, -1.0 / 3.0, 0.5, std::nullopt, std::nullopt, 1.5}};
  recs[1].method = "emicore";
  recs[1].seed = 9;
  recs[1].rows = {{1, 0.1, std::nullopt, 0.7, 2.5, 0.0}};
  const auto rows = to_csv_rows(recs);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].method, "emicore");
  EXPECT_EQ(rows[1].n_obs, 1);
  EXPECT_EQ(rows[2].n_obs, 3);

  std::stringstream ss;
  write_csv(ss, rows);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kCsvHeader);
  const auto back = read_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].method, rows[i].method);
    EXPECT_EQ(back[i].seed, rows[i].seed);
    EXPECT_EQ(back[i].n_obs, rows[i].n_obs);
    EXPECT_EQ(back[i].energy, rows[i].energy);
    EXPECT_EQ(back[i].fidelity, rows[i].fidelity);
    EXPECT_EQ(back[i].kappa, rows[i].kappa);
    EXPECT_EQ(back[i].gamma, rows[i].gamma);
    EXPECT_EQ(back[i].wall_ms, rows[i].wall_ms);
  }
  std::stringstream bad("seed,method\n");
  EXPECT_THROW(read_csv(bad), std::invalid_argument);
}

TEST(Report, TracesSkipMissingMetric) {
  std::vector<CsvRow> rows{{"a", 0, 1, -1.0, 0.5}, {"a", 0, 3, -2.0, 0.6}, {"a", 1, 1, -1.5, std::nullopt}};
  EXPECT_EQ(traces_for(rows, "a", Metric::energy).size(), 2u);
  const auto f = traces_for(rows, "a", Metric::fidelity);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].y, (std::vector<double>{0.5, 0.6}));
  EXPECT_TRUE(traces_for(rows, "b", Metric::energy).empty());
}

TEST(Report, KdeIntegratesToOne) {
  const std::vector<double> v{-5.9, -5.8, -5.95, -5.5, -5.7, -5.99, -5.6};
  const auto d = kde(v, -8.0, -3.5, 2000);
  double area = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) area += 0.5 * (d[i].second + d[i - 1].second) * (d[i].first - d[i - 1].first);
  EXPECT_NEAR(area, 1.0, 1e-3);
  const auto single = kde({1.0}, 0.0, 2.0, 2000);
  EXPECT_FALSE(single.empty());
}

TEST(Experiment, RunsAndReproducesFromManifest) {
  const auto dir = scratch_dir("first");
  const auto cfg = small_config();
  const auto res = run_experiment(cfg, dir);
  EXPECT_EQ(res.aborted, 0u);
  ASSERT_EQ(res.records.size(), 9u);
  ASSERT_TRUE(res.ground_energy.has_value());
  for (const char* f : {"results.csv", "manifest.json", "summary.txt", "curves.svg"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_NE(slurp(dir / "curves.svg").find("<svg"), std::string::npos);

  for (const auto& r : res.records) {
    ASSERT_FALSE(r.rows.empty());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      if (i > 0) EXPECT_GT(r.rows[i].n_obs, r.rows[i - 1].n_obs);
      EXPECT_GE(r.rows[i].energy, *res.ground_energy - 1e-10);
      ASSERT_TRUE(r.rows[i].fidelity.has_value());
      EXPECT_GE(*r.rows[i].fidelity, 0.0);
      EXPECT_LE(*r.rows[i].fidelity, 1.0 + 1e-12);
      EXPECT_EQ(r.rows[i].wall_ms, 0.0);
    }
  }

  // Every method starts from the same cached point per seed.
  for (std::uint64_t s : cfg.seeds) {
    std::vector<double> starts;
    for (const auto& r : res.records) {
      if (r.seed == s) starts.push_back(r.rows.front().energy);
    }
    ASSERT_EQ(starts.size(), cfg.methods.size());
    for (double e : starts) EXPECT_EQ(e, starts.front());
  }

  nlohmann::json manifest;
  std::ifstream(res.manifest_path) >> manifest;
  EXPECT_EQ(manifest.at("config_hash").get<std::string>(), hex64(cfg.hash()));
  EXPECT_EQ(manifest.at("cells").get<std::size_t>(), 9u);
  EXPECT_TRUE(manifest.at("aborted").empty());
  EXPECT_TRUE(fs::exists(dir / manifest.at("initial_point_cache").get<std::string>()));

  auto again = ExperimentConfig::from_json(manifest.at("config"));
  again.jobs = 4;
  const auto dir2 = scratch_dir("second");
  const auto res2 = run_experiment(again, dir2);
  EXPECT_EQ(slurp(res2.csv_path), slurp(res.csv_path));
  EXPECT_EQ(slurp(dir2 / "summary.txt"), slurp(dir / "summary.txt"));

  // Re-aggregating the CSV reproduces the in-memory summary.
  std::ifstream in(res.csv_path);
  const auto from_csv = summarize(read_csv(in));
  const auto direct = summarize(to_csv_rows(res.records));
  ASSERT_EQ(from_csv.size(), direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    EXPECT_EQ(from_csv[i].energy.median, direct[i].energy.median);
    EXPECT_EQ(from_csv[i].fidelity->q75, direct[i].fidelity->q75);
  }
}

TEST(Experiment, PlainBoCell) {
  auto cfg = small_config();
  cfg.methods = {Method::bo_ei};
  cfg.seeds = {5};
  cfg.n_iter = 6;
  cfg.bo_restarts = 2;
  cfg.svg = false;
  const auto dir = scratch_dir("bo");
  const auto res = run_experiment(cfg, dir);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_FALSE(res.records[0].aborted) << res.records[0].diagnostic;
  EXPECT_EQ(res.records[0].rows.back().n_obs, 7);
  EXPECT_FALSE(fs::exists(dir / "curves.svg"));
}

TEST(Experiment, EmptySeedListWritesManifestOnly) {
  auto cfg = small_config();
  cfg.seeds.clear();
  const auto dir = scratch_dir("empty");
  const auto res = run_experiment(cfg, dir);
  EXPECT_TRUE(res.records.empty());
  EXPECT_EQ(res.aborted, 0u);
  EXPECT_TRUE(fs::exists(res.manifest_path));
  std::ifstream in(res.csv_path);
  EXPECT_TRUE(read_csv(in).empty());
  EXPECT_FALSE(fs::exists(dir / "curves.svg"));
}

TEST(Experiment, NoFidelityBeyondDiagonalizationLimit) {
  auto cfg = small_config();
  cfg.problem.qubits = kMaxDiagonalizationQubits + 1;
  cfg.problem.layers = 0;
  cfg.methods = {Method::nft_seq};
  cfg.seeds = {0};
  cfg.n_iter = 2;
  cfg.svg = false;
  const auto res = run_experiment(cfg, scratch_dir("large"));
  EXPECT_FALSE(res.ground_energy.has_value());
  ASSERT_EQ(res.records.size(), 1u);
  for (const auto& row : res.records[0].rows) EXPECT_FALSE(row.fidelity.has_value());
}
