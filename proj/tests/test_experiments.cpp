#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rda/experiments.hpp"

using namespace rda;

namespace {

// Composite Simpson on the node polynomial, independent of the Gauss rule
// used by the library.
double cm_simpson(int m)
{
    const auto w2 = [m](double x) {
        double p = 1.0;
        for (int i = 0; i <= m; ++i) {
            p *= x - i - 0.5;
        }
        return p * p;
    };
    const auto simpson = [&](double a, double b) {
        const int n = 20000;
        const double h = (b - a) / n;
        double s = w2(a) + w2(b);
        for (int i = 1; i < n; ++i) {
            s += (i % 2 ? 4.0 : 2.0) * w2(a + i * h);
        }
        return s * h / 3.0;
    };
    const double left = std::floor(m / 2.0);
    return std::sqrt((m + 1) * simpson(left, left + 1.0) / simpson(0.0, m + 1.0));
}

std::string csv(const ResultTable& t)
{
    std::ostringstream out;
    write_csv(out, t);
    return out.str();
}

} // namespace

TEST(CmTheoretical, MatchesIndependentQuadrature)
{
    for (int m = 2; m <= 6; ++m) {
        EXPECT_NEAR(cm_theoretical(m), cm_simpson(m), 1e-6) << "m=" << m;
    }
    EXPECT_NEAR(cm_theoretical(2), std::sqrt(407.0 / 263.0) / 3.0, 1e-12);
    EXPECT_THROW(cm_theoretical(1), UnsupportedError);
    EXPECT_THROW(cm_theoretical(7), UnsupportedError);
}

TEST(CmTheoretical, DecreasesWithDegree)
{
    for (int m = 3; m <= 6; ++m) {
        EXPECT_LT(cm_theoretical(m), cm_theoretical(m - 1));
        EXPECT_LT(cm_theoretical(m), 1.0);
    }
}

TEST(CmEmpirical, SineRatios)
{
    const Cm1dResult r2 = cm_empirical_1d(2, 40);
    const Cm1dResult r5 = cm_empirical_1d(5, 40);
    EXPECT_FALSE(r2.exact_reproduction);
    EXPECT_NEAR(r2.ratio, 0.417, 0.417 * 0.05);
    EXPECT_NEAR(r5.ratio, 0.0897, 0.0897 * 0.05);
    EXPECT_NEAR(r2.ratio, r2.rda_error / r2.dg_error, 1e-15);
}

TEST(CmEmpirical, TendsToTheoreticalUnderRefinement)
{
    for (int m : {2, 4}) {
        const double coarse = std::abs(cm_empirical_1d(m, 40).ratio - cm_theoretical(m));
        const double fine = std::abs(cm_empirical_1d(m, 160).ratio - cm_theoretical(m));
        EXPECT_LT(fine, coarse);
        EXPECT_LT(fine, 2e-3);
    }
}

TEST(CmEmpirical, PolynomialsReproducedOneSided)
{
    const auto g = [](double x) { return 1.0 - 2.0 * x + 3.0 * x * x * x; };
    const Cm1dResult r = cm_empirical_1d(3, 12, g, PatchWrap::one_sided);
    EXPECT_TRUE(r.exact_reproduction);
    EXPECT_EQ(r.ratio, 0.0);
    EXPECT_LE(r.rda_error, 1e-12);
}

TEST(CmEmpirical, RequiresTenCellsPerWavelength)
{
    EXPECT_THROW(cm_empirical_1d(2, 30), ConfigError);
    EXPECT_NO_THROW(cm_empirical_1d(3, 25));
}

TEST(Orders, ObservedOrderAndFloor)
{
    EXPECT_NEAR(observed_order(8.0, 1.0), 3.0, 1e-14);
    EXPECT_NEAR(observed_order(9.0, 1.0, 3.0), 2.0, 1e-14);
    EXPECT_TRUE(std::isnan(observed_order(1e-15, 1e-16)));
    EXPECT_TRUE(std::isnan(observed_order(1.0, 0.0)));
}

TEST(Orders, LogLogInterpolation)
{
    const std::vector<double> x{10.0, 100.0, 1000.0};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(3.0 * std::pow(v, -1.5));
    }
    for (double x0 : {5.0, 10.0, 37.0, 640.0, 5000.0}) {
        EXPECT_NEAR(loglog_interpolate(x, y, x0) / (3.0 * std::pow(x0, -1.5)), 1.0, 1e-12);
    }
}

TEST(Config, Validation)
{
    ExperimentConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.n_list = {10, 10};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.n_list = {0, 4};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.n_list = {4};
    cfg.m_list = {7};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.m_list = {2};
    cfg.k = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);

    ExperimentConfig ksq;
    ksq.k = 3.0;
    ksq.eps = EpsMode::ksq;
    EXPECT_EQ(ksq.eps_value(), 9.0);
    EXPECT_EQ(ksq.helmholtz(4).degree, 4);
    EXPECT_EQ(ksq.helmholtz(4).eps, 9.0);
    EXPECT_EQ(ksq.helmholtz(4, 0.0).eps, 0.0);
}

TEST(Table, CsvAndJson)
{
    ResultTable t;
    t.columns = {"m", "err", "note", "z", "order"};
    t.add_row({2LL, 0.125, std::string("a,b"), Complex(1.0, -0.5), std::monostate{}});
    t.add_row({3LL, std::nan(""), std::string("ok"), Complex(0.0, 2.0), 2.5});
    t.set_meta("k", "5");
    t.set_meta("k", "6");
    EXPECT_THROW(t.add_row({1LL}), DimensionError);
    EXPECT_EQ(t.column("note"), 2);
    EXPECT_EQ(t.column("missing"), -1);
    EXPECT_EQ(csv(t), "m,err,note,z,order\n2,0.125,\"a,b\",1-0.5i,\n3,,ok,0+2i,2.5\n");

    std::ostringstream js;
    write_json(js, t);
    const std::string s = js.str();
    EXPECT_NE(s.find("\"k\": \"6\""), std::string::npos);
    EXPECT_NE(s.find("\"order\": null"), std::string::npos);
    EXPECT_NE(s.find("\"err\": 0.125"), std::string::npos);
    EXPECT_NE(s.find("\"z\": \"1-0.5i\""), std::string::npos);
    EXPECT_EQ(t.metadata.size(), 1u);
}

TEST(Studies, SmallConvergenceRunIsConsistent)
{
    ExperimentConfig cfg;
    cfg.m_list = {2};
    cfg.n_list = {4, 8};
    const ResultTable t = run_convergence(cfg);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.failed_rows, 0);
    const int l2 = t.column("l2"), order = t.column("order_l2");
    ASSERT_GE(l2, 0);
    ASSERT_GE(order, 0);
    EXPECT_TRUE(std::holds_alternative<std::monostate>(t.rows[0][order]));
    const double e0 = std::get<double>(t.rows[0][l2]), e1 = std::get<double>(t.rows[1][l2]);
    EXPECT_LT(e1, e0);
    EXPECT_NEAR(std::get<double>(t.rows[1][order]), observed_order(e0, e1), 1e-12);
    EXPECT_EQ(csv(t), csv(run_convergence(cfg)));
}

TEST(Studies, CmTableRows)
{
    const ResultTable t = cm_table({2, 3}, 40);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.failed_rows, 0);
}

TEST(Studies, SpectrumReportShape)
{
    ExperimentConfig cfg;
    cfg.k = 4.0;
    cfg.m_list = {2};
    cfg.n_list = {3};
    cfg.eps = EpsMode::ksq;
    const ResultTable t = spectrum_report(cfg);
    ASSERT_EQ(t.columns, (std::vector<std::string>{"matrix", "re", "im"}));
    EXPECT_EQ(t.rows.size(), 2u * 18u);
}
