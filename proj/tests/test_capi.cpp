#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "proxcert/proxcert.h"

namespace fs = std::filesystem;

TEST(CApi, SpectrumAndConditionNumber) {
  double mu = 0.0;
  double L = 0.0;
  ASSERT_EQ(pc_tridiagonal_spectrum(500, 2.0, 1.0, &mu, &L), PC_OK);
  EXPECT_NEAR(mu / 1.5461e-9, 1.0, 5e-5);
  EXPECT_NEAR(L / 15.9997, 1.0, 5e-6);
  double cond = 0.0;
  int finite = 0;
  ASSERT_EQ(pc_condition_number(mu, L, &cond, &finite), PC_OK);
  EXPECT_EQ(finite, 1);
  ASSERT_EQ(pc_condition_number(0.0, L, &cond, &finite), PC_OK);
  EXPECT_EQ(finite, 0);
  EXPECT_TRUE(std::isinf(cond));
}

TEST(CApi, ErrorsCarryStatusAndMessage) {
  double mu = 0.0;
  double L = 0.0;
  EXPECT_EQ(pc_tridiagonal_spectrum(0, 2.0, 1.0, &mu, &L), PC_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::strlen(pc_last_error()), 0u);
  EXPECT_EQ(pc_tridiagonal_spectrum(5, 2.0, 1.0, nullptr, &L), PC_ERR_INVALID_ARGUMENT);
  pc_problem* p = nullptr;
  EXPECT_EQ(pc_problem_load("/nonexistent/x.json", &p), PC_ERR_IO);
  EXPECT_EQ(p, nullptr);
  pc_method m;
  EXPECT_EQ(pc_parse_method("newton", &m), PC_ERR_INVALID_ARGUMENT);
  EXPECT_STREQ(pc_status_name(PC_ERR_PARSE), "parse error");
  pc_problem_free(nullptr);
  pc_trace_free(nullptr);
  pc_report_free(nullptr);
  pc_experiment_free(nullptr);
}

TEST(CApi, SolveWriteCertifyPlot) {
  pc_problem* p = nullptr;
  ASSERT_EQ(pc_problem_random_lasso(20, 12, 0.1, 1.0, 5, 0.05, &p), PC_OK);
  double mu = 0.0;
  double L = 0.0;
  int64_t d = 0;
  ASSERT_EQ(pc_problem_info(p, &mu, &L, &d), PC_OK);
  EXPECT_EQ(d, 12);

  pc_solve_options opt;
  pc_solve_options_init(&opt);
  ASSERT_EQ(pc_parse_method("fista-phase", &opt.method), PC_OK);
  EXPECT_EQ(opt.method, PC_METHOD_FISTA_PHASE_SPACE);
  opt.step = 0.5 / L;
  opt.max_iters = 300;
  pc_trace* t = nullptr;
  ASSERT_EQ(pc_solve(p, &opt, &t), PC_OK);
  pc_trace_summary s{};
  ASSERT_EQ(pc_trace_summary_get(t, &s), PC_OK);
  EXPECT_EQ(s.final_k, 300u);
  EXPECT_EQ(s.terminated_by, PC_TERM_MAX_ITERS);
  EXPECT_GE(s.final_phi_gap, -1e-12);

  const fs::path dir = fs::temp_directory_path() / "proxcert_capi";
  fs::create_directories(dir);
  const std::string csv = (dir / "t.csv").string();
  ASSERT_EQ(pc_trace_write_csv(t, csv.c_str()), PC_OK);

  pc_report* direct = nullptr;
  ASSERT_EQ(pc_trace_certify(t, &direct), PC_OK);
  EXPECT_EQ(pc_report_passed(direct), 1);

  pc_report* replay = nullptr;
  ASSERT_EQ(pc_certify_trace_file(csv.c_str(), p, &replay), PC_OK);
  EXPECT_EQ(pc_report_passed(replay), 1);
  ASSERT_EQ(pc_report_check_count(replay), pc_report_check_count(direct));
  for (size_t i = 0; i < pc_report_check_count(replay); ++i) {
    pc_check_info a{};
    pc_check_info b{};
    ASSERT_EQ(pc_report_check(direct, i, &a), PC_OK);
    ASSERT_EQ(pc_report_check(replay, i, &b), PC_OK);
    EXPECT_STREQ(a.name, b.name);
    EXPECT_EQ(a.worst_slack, b.worst_slack);
  }
  pc_check_info none{};
  EXPECT_EQ(pc_report_check(replay, 999, &none), PC_ERR_INVALID_ARGUMENT);
  const std::string rep = (dir / "r.json").string();
  ASSERT_EQ(pc_report_write(replay, rep.c_str()), PC_OK);
  EXPECT_TRUE(fs::exists(rep));

  const std::string plot = (dir / "p.csv").string();
  EXPECT_EQ(pc_plotdata(csv.c_str(), "lyapunov", 1, plot.c_str()), PC_OK);
  EXPECT_EQ(pc_plotdata(csv.c_str(), "bogus", 0, plot.c_str()), PC_ERR_INVALID_ARGUMENT);

  // A truncated file is a parse error.
  {
    std::ifstream in(csv, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream((dir / "cut.csv").string(), std::ios::binary) << text.substr(0, text.size() / 2);
  }
  pc_report* bad = nullptr;
  EXPECT_EQ(pc_certify_trace_file((dir / "cut.csv").string().c_str(), p, &bad), PC_ERR_PARSE);

  pc_report_free(direct);
  pc_report_free(replay);
  pc_trace_free(t);
  pc_problem_free(p);
}

TEST(CApi, ProblemSaveLoad) {
  pc_problem* p = nullptr;
  ASSERT_EQ(pc_problem_tridiagonal(10, 2.0, 1.0, 1.0, 1e-3, &p), PC_OK);
  const std::string path = (fs::temp_directory_path() / "proxcert_capi_inst.json").string();
  ASSERT_EQ(pc_problem_save(p, path.c_str()), PC_OK);
  pc_problem* q = nullptr;
  ASSERT_EQ(pc_problem_load(path.c_str(), &q), PC_OK);
  double mu1, L1, mu2, L2;
  pc_problem_info(p, &mu1, &L1, nullptr);
  pc_problem_info(q, &mu2, &L2, nullptr);
  EXPECT_EQ(mu1, mu2);
  EXPECT_EQ(L1, L2);
  pc_problem_free(p);
  pc_problem_free(q);

  double step = 0.0;
  ASSERT_EQ(pc_problem_paper(&p, &step), PC_OK);
  EXPECT_EQ(step, 0.05);
  pc_problem_free(p);
}

TEST(CApi, Experiment) {
  const fs::path dir = fs::temp_directory_path() / "proxcert_capi_exp";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"instance": {"type": "random_lasso", "m": 10, "d": 8, "mu_target": 0.2,
      "L_target": 1, "seed": 1, "lambda": 0.01}, "solvers": ["ista", "fista"], "stop": {"max_iters": 200},
      "output_dir": ")" << (dir / "out").string() << "\"}";
  pc_experiment* e = nullptr;
  ASSERT_EQ(pc_experiment_run(cfg.string().c_str(), &e), PC_OK);
  ASSERT_EQ(pc_experiment_run_count(e), 2u);
  pc_run_info info{};
  ASSERT_EQ(pc_experiment_run_info(e, 1, &info), PC_OK);
  EXPECT_EQ(info.method, PC_METHOD_FISTA_MOMENTUM);
  EXPECT_EQ(info.certified, 1);
  EXPECT_TRUE(fs::exists(pc_experiment_summary_path(e)));
  pc_experiment_free(e);
}
