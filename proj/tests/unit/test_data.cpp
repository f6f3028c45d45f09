#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "causalrl/data/csv.hpp"
#include "causalrl/data/dataset.hpp"
#include "causalrl/data/preprocess.hpp"
#include "causalrl/errors.hpp"
#include "causalrl/util/random.hpp"

using namespace causalrl;
using namespace causalrl::data;
using numeric::Matrix;

namespace {

Dataset from_text(const std::string& text, const std::optional<VariableTable>& schema = std::nullopt) {
    std::istringstream in(text);
    return load_csv(in, schema);
}

Dataset numeric_dataset(const std::vector<std::string>& names, const std::vector<NumericColumn>& cols) {
    VariableTable vars;
    std::vector<Column> columns;
    for (std::size_t j = 0; j < names.size(); ++j) {
        vars.push_back({names[j], VariableKind::Continuous, std::nullopt});
        columns.emplace_back(cols[j]);
    }
    return Dataset(vars, columns);
}

double mean_of(const NumericColumn& c) {
    double s = 0.0;
    for (double v : c) s += v;
    return s / static_cast<double>(c.size());
}

double sample_sd(const NumericColumn& c) {
    const double mu = mean_of(c);
    double s = 0.0;
    for (double v : c) s += (v - mu) * (v - mu);
    return std::sqrt(s / static_cast<double>(c.size() - 1));
}

}  // namespace

TEST_CASE("csv parsing") {
    SUBCASE("numeric table") {
        const auto ds = from_text("a,b\n1,2\n3,4.5\n-1e2,0\n");
        CHECK(ds.rows() == 3);
        CHECK(ds.cols() == 2);
        CHECK(ds.variables()[0].kind == VariableKind::Continuous);
        CHECK(ds.variables()[1].kind == VariableKind::Continuous);
        CHECK(ds.samples()(2, 0) == -100.0);
        CHECK(ds.samples()(1, 1) == 4.5);
    }
    SUBCASE("quoted fields") {
        std::istringstream in("x,\"y, z\"\n\"a \"\"q\"\"\",\"line\nbreak\"\n");
        const auto rec = parse_csv(in);
        REQUIRE(rec.size() == 2);
        CHECK(rec[0][1] == "y, z");
        CHECK(rec[1][0] == "a \"q\"");
        CHECK(rec[1][1] == "line\nbreak");
    }
    SUBCASE("non-numeric column becomes categorical") {
        const auto ds = from_text("mode,days\nFirst Class,1\nSame Day,0\nFirst Class,2\n");
        CHECK(ds.variables()[0].kind == VariableKind::Categorical);
        CHECK(ds.variables()[1].kind == VariableKind::Continuous);
        CHECK(ds.is_text_column(0));
        CHECK_THROWS_AS(ds.samples(), UsageError);
    }
    SUBCASE("ragged row names the row") {
        try {
            from_text("a,b\n1,2\n3\n4,5\n");
            FAIL("expected an ingestion error");
        } catch (const IngestionError& e) {
            CHECK(std::string(e.what()).find("row 2") != std::string::npos);
        }
    }
    SUBCASE("empty input") {
        CHECK_THROWS_AS(from_text(""), IngestionError);
        CHECK_THROWS_AS(from_text("a,b\n"), IngestionError);
    }
    SUBCASE("rows with blank cells are dropped and counted") {
        const auto ds = from_text("a,b\n1,2\n,3\n4,5\n");
        CHECK(ds.rows() == 2);
        CHECK(ds.notes().dropped_rows == 1);
    }
    SUBCASE("schema selects and orders columns") {
        VariableTable schema({{"b", VariableKind::Continuous, "X1"}, {"a", VariableKind::Continuous, "X2"}});
        const auto ds = from_text("a,b,c\n1,2,z\n3,4,y\n", schema);
        CHECK(ds.cols() == 2);
        CHECK(ds.variables()[0].name == "b");
        CHECK(ds.samples()(1, 0) == 4.0);
        CHECK(ds.variables().label(0) == "b (X1)");
        VariableTable missing({{"q", VariableKind::Continuous, std::nullopt}});
        CHECK_THROWS_AS(from_text("a,b\n1,2\n", missing), IngestionError);
    }
    SUBCASE("unreadable file") {
        CHECK_THROWS_AS(load_csv(std::filesystem::path("/nonexistent/file.csv")), IngestionError);
    }
    SUBCASE("write then read round-trips") {
        const auto ds = numeric_dataset({"p", "q"}, {{0.1, 1.0 / 3.0, -2.5e-7}, {1e300, 0.0, -1.0}});
        std::ostringstream out;
        write_csv(out, ds);
        const auto back = from_text(out.str());
        CHECK(back.samples() == ds.samples());
    }
}

TEST_CASE("variable table") {
    CHECK_THROWS_AS(VariableTable({{"a", VariableKind::Continuous, {}}, {"a", VariableKind::Continuous, {}}}),
                    ValidationError);
    VariableTable t({{"a", VariableKind::Continuous, {}}, {"b", VariableKind::Categorical, {}}});
    CHECK(t.index_of("b") == 1);
    CHECK_THROWS_AS(t.index_of("z"), UsageError);
    CHECK(t.label(0) == "a");
}

TEST_CASE("categorical encoding") {
    const auto raw = from_text("c,n\nA,5\nB,6\nA,7\n");
    const auto enc = encode_categoricals(raw);
    CHECK(enc.is_numeric());
    CHECK(enc.numeric_column(0) == NumericColumn{0, 1, 0});
    CHECK(enc.numeric_column(1) == NumericColumn{5, 6, 7});
    CHECK(enc.variables()[0].kind == VariableKind::Categorical);
    CHECK(decode_column(enc, 0) == std::get<TextColumn>(raw.column(0)));
    CHECK(encode_categoricals(enc) == enc);
}

TEST_CASE("correlation matrix") {
    Rng rng(4);
    NumericColumn x(200), noise(200), c(200, 3.0);
    for (auto& v : x) v = rng.normal();
    for (auto& v : noise) v = rng.normal();
    NumericColumn neg(x.size());
    std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
    const auto ds = numeric_dataset({"x", "same", "neg", "noise", "const"}, {x, x, neg, noise, c});
    const auto res = correlation_matrix(ds);
    CHECK(res.r(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.r(0, 2) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(res.r(0, 3)) < 0.3);
    CHECK(res.r(4, 0) == 0.0);
    CHECK(res.constant_columns == std::vector<std::size_t>{4});
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(res.r(i, i) == 1.0);
        for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(res.r(i, j) - res.r(j, i)) < 1e-12);
    }
}

TEST_CASE("multicollinearity filter") {
    Rng rng(9);
    const std::size_t m = 500;
    NumericColumn base(m), a(m), b(m), c(m), free(m);
    for (std::size_t i = 0; i < m; ++i) {
        base[i] = rng.normal();
        a[i] = base[i] + 0.01 * rng.normal();
        b[i] = 2.0 * base[i] + 0.01 * rng.normal();
        c[i] = -base[i] + 0.01 * rng.normal();
        free[i] = rng.normal();
    }
    SUBCASE("correlated triple keeps the first") {
        const auto ds = numeric_dataset({"a", "free", "b", "c"}, {a, free, b, c});
        const auto corr = correlation_matrix(ds).r;
        REQUIRE(std::abs(corr(0, 2)) > 0.95);
        REQUIRE(std::abs(corr(0, 3)) > 0.95);
        REQUIRE(std::abs(corr(2, 3)) > 0.95);
        const auto res = multicollinearity_filter(ds, {});
        CHECK(res.dropped == std::vector<std::string>{"b", "c"});
        CHECK(res.dataset.cols() == 2);
        CHECK(res.dataset.variables()[0].name == "a");
        CHECK(res.dataset.variables()[1].name == "free");
    }
    SUBCASE("target is never dropped") {
        const auto ds = numeric_dataset({"a", "b", "free"}, {a, b, free});
        PreprocessConfig cfg;
        cfg.target = "b";
        const auto res = multicollinearity_filter(ds, cfg);
        CHECK(res.dropped == std::vector<std::string>{"a"});
        CHECK(res.dataset.variables().find("b").has_value());
    }
    SUBCASE("duplicate column and threshold 1.0") {
        const auto ds = numeric_dataset({"a", "dup", "b"}, {a, a, b});
        PreprocessConfig cfg;
        cfg.correlation_threshold = 1.0;
        CHECK(multicollinearity_filter(ds, cfg).dropped == std::vector<std::string>{"dup"});
        CHECK(multicollinearity_filter(ds, {}).dropped.size() == 2);
    }
    SUBCASE("manual drops") {
        const auto ds = numeric_dataset({"a", "free"}, {a, free});
        PreprocessConfig cfg;
        cfg.drop_columns = {"free"};
        CHECK(multicollinearity_filter(ds, cfg).dataset.cols() == 1);
    }
}

TEST_CASE("standardize") {
    const auto ds = numeric_dataset({"x", "k"}, {{1, 2, 3}, {7, 7, 7}});
    const auto z = standardize(ds);
    CHECK(std::abs(mean_of(z.numeric_column(0))) < 1e-12);
    CHECK(std::abs(sample_sd(z.numeric_column(0)) - 1.0) < 1e-12);
    CHECK(z.numeric_column(1) == NumericColumn{0, 0, 0});
    CHECK(z.notes().constant_columns == std::vector<std::string>{"k"});

    Rng rng(2);
    NumericColumn w(1000);
    for (auto& v : w) v = 5.0 + 3.0 * rng.normal();
    const auto once = standardize(numeric_dataset({"w"}, {w}));
    const auto twice = standardize(once);
    CHECK(numeric::max_abs_diff(once.samples(), twice.samples()) < 1e-12);
}

TEST_CASE("preprocess is a pure function of its inputs") {
    const std::string text = "mode,a,b,t\nX,1,2,0.5\nY,2,4.1,0.1\nX,3,5.9,0.7\nZ,4,8.2,0.2\n";
    PreprocessConfig cfg;
    cfg.target = "t";
    const auto one = preprocess(from_text(text), cfg);
    const auto two = preprocess(from_text(text), cfg);
    CHECK(one.processed == two.processed);
    CHECK(one.raw_encoded == two.raw_encoded);
    CHECK(one.processed.notes().dropped_columns == std::vector<std::string>{"b"});
    cfg.target = "missing";
    CHECK_THROWS(preprocess(from_text(text), cfg));
}

TEST_CASE("sample batch") {
    Matrix x(120, 3);
    for (std::size_t i = 0; i < 120; ++i)
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = static_cast<double>(i * 10 + j);
    const Dataset ds(VariableTable({{"a", VariableKind::Continuous, {}},
                                    {"b", VariableKind::Continuous, {}},
                                    {"c", VariableKind::Continuous, {}}}),
                     x);

    const Matrix full = sample_batch(ds, 120, 1);
    CHECK(full.rows() == 3);
    CHECK(full.cols() == 120);
    std::multiset<double> seen(full.row(0).begin(), full.row(0).end());
    std::multiset<double> expected;
    for (std::size_t i = 0; i < 120; ++i) expected.insert(x(i, 0));
    CHECK(seen == expected);
    // Columns stay aligned: each drawn sample is one whole row.
    for (std::size_t k = 0; k < 120; ++k) {
        CHECK(full(1, k) == full(0, k) + 1.0);
        CHECK(full(2, k) == full(0, k) + 2.0);
    }

    CHECK(sample_batch(ds, 16, 7) == sample_batch(ds, 16, 7));
    int distinct = 0;
    for (std::uint64_t s = 0; s < 10; ++s) distinct += sample_batch(ds, 16, 2 * s) != sample_batch(ds, 16, 2 * s + 1);
    CHECK(distinct == 10);

    CHECK_THROWS_AS(sample_batch(ds, 0, 1), UsageError);
    CHECK_THROWS_AS(sample_batch(ds, 121, 1), UsageError);
}
