#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lionets/csv.hpp"
#include "lionets/errors.hpp"
#include "lionets/numerics.hpp"
#include "lionets/synthetic.hpp"
#include "lionets/text.hpp"
#include "lionets/timeseries.hpp"

using namespace lionets;
using namespace lionets::data;

TEST_CASE("preprocessing") {
    CHECK(preprocess_text("What's up?") == "what is up");
    CHECK(preprocess_text("100% done") == "100 percent done");
    CHECK(preprocess_text("") == "");
    CHECK(preprocess_text("  I'll   call\tyou!! ") == "i will call you");
    CHECK(preprocess_text("calling", {.stem = false}) == "calling");
    CHECK(preprocess_text("calling") == "call");
    for (const char* raw : {"What's up?", "Congrats!! You've WON a $1000 prize, txt 80082 now",
                            "I'm walking home... can't talk", "won't they've 50%", ""}) {
        const auto once = preprocess_text(raw);
        CHECK(preprocess_text(once) == once);
    }
    CHECK(stem_token(stem_token("boxes")) == stem_token("boxes"));
    CHECK(tokenize("a  b c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("tfidf vocabulary") {
    const auto v = tfidf_fit({"a b", "b c"}, 10);
    CHECK(v.tokens() == std::vector<std::string>{"a", "b", "c"});
    CHECK(v.document_frequency() == std::vector<std::size_t>{1, 2, 1});
    CHECK(v.document_count() == 2);

    const auto capped = tfidf_fit({"a b", "b c"}, 2);
    CHECK(capped.tokens() == std::vector<std::string>{"a", "b"});

    const auto again = tfidf_fit({"a b", "b c"}, 10);
    CHECK(again.tokens() == v.tokens());
    CHECK(again.document_frequency() == v.document_frequency());

    const auto idf = tfidf_fit({"a", "a b"});
    CHECK(idf.idf(*idf.index_of("a")) == doctest::Approx(1.0));
    CHECK(idf.idf(*idf.index_of("b")) == doctest::Approx(std::log(1.5) + 1.0));
    CHECK(idf.idf(*idf.index_of("b")) == doctest::Approx(1.405).epsilon(1e-3));
    CHECK_FALSE(idf.index_of("z").has_value());

    const auto round = Vocabulary::from_json(v.to_json());
    CHECK(round.tokens() == v.tokens());
    CHECK_THROWS_AS(Vocabulary({"a", "a"}, {1, 1}, 2), ValidationError);
    CHECK_THROWS_AS(tfidf_fit({}), DomainError);
}

TEST_CASE("tfidf vectors") {
    const auto v = tfidf_fit({"free prize now", "call me now", "see you at home"});
    CHECK(l2_norm(tfidf_transform(v, "unknown words only")) == 0.0);
    for (int k = 1; k <= 4; ++k) {
        std::string doc;
        for (int i = 0; i < k; ++i) doc += "prize ";
        const Vec x = tfidf_transform(v, doc);
        CHECK(x[*v.index_of("prize")] == doctest::Approx(1.0));
        CHECK(l2_norm(x) == doctest::Approx(1.0));
    }
    const Vec mixed = vectorize(v, "Call me now, FREE prize!");
    CHECK(l2_norm(mixed) == doctest::Approx(1.0));
    CHECK(mixed[*v.index_of("home")] == 0.0);
}

TEST_CASE("time windows") {
    UnitSeries u;
    u.unit = 1;
    u.timesteps = {0, 1, 2, 3, 4};
    u.readings = Matrix(5, 2);
    for (std::size_t t = 0; t < 5; ++t) {
        u.readings(t, 0) = static_cast<double>(t);
        u.readings(t, 1) = 10.0 + static_cast<double>(t);
    }
    u.rul = {4, 3, 2, 1, 0};
    UnitSeries short_unit = u;
    short_unit.unit = 2;
    short_unit.timesteps = {0, 1};
    short_unit.readings = Matrix(2, 2, 1.0);
    short_unit.rul = {1, 0};

    const auto ds = make_windows({u, short_unit}, 3);
    REQUIRE(ds.windows.rows() == 3);
    CHECK(ds.end_timesteps == std::vector<int>{2, 3, 4});
    CHECK(ds.labels == Vec{2, 1, 0});
    CHECK(ds.skipped_units == std::vector<int>{2});
    CHECK(ds.units == std::vector<int>{1, 1, 1});
    const auto row = ds.windows.row(1);
    CHECK(Vec(row.begin(), row.end()) == Vec{1, 11, 2, 12, 3, 13});
    CHECK(row[window_index(2, 1, 2)] == 13);

    CHECK(make_windows({u}, 5).windows.rows() == 1);

    UnitSeries big;
    big.readings = Matrix(50, 14, 0.5);
    big.rul = Vec(50, 1.0);
    for (int t = 0; t < 50; ++t) big.timesteps.push_back(t);
    CHECK(make_windows({big}, 50).windows.cols() == 700);
    CHECK_THROWS_AS(make_windows({u}, 0), DomainError);
}

TEST_CASE("rul binarisation") {
    CHECK(binarize_rul(Vec{30, 25, 20}, 25) == Vec{0, 1, 1});
    CHECK_THROWS_AS(binarize_rul(Vec{1}, 0), DomainError);
}

TEST_CASE("synthetic classification") {
    const auto a = synth_classification(100, 6, 7);
    const auto b = synth_classification(100, 6, 7);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(a.features.rows() == 100);
    CHECK(a.features.cols() == 6);
    CHECK(std::count(a.labels.begin(), a.labels.end(), 1.0) == 50);
    CHECK(std::count(a.labels.begin(), a.labels.end(), -1.0) == 50);
    const auto& v = a.features.values();
    CHECK(*std::min_element(v.begin(), v.end()) >= 0.0);
    CHECK(*std::max_element(v.begin(), v.end()) <= 1.0);
    CHECK(synth_classification(100, 6, 8).features != a.features);

    const auto fit = weighted_ridge_fit(a.features, a.labels, Vec(100, 1.0), 1e-6);
    int correct = 0;
    for (std::size_t i = 0; i < 100; ++i)
        correct += (fit.predict(a.features.row(i)) >= 0) == (a.labels[i] > 0);
    CHECK(correct >= 85);
    CHECK_THROWS_AS(synth_classification(1, 6, 7), DomainError);
}

TEST_CASE("synthetic degradation") {
    const auto a = synth_degradation(4, 3, 11);
    const auto b = synth_degradation(4, 3, 11);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].readings == b[i].readings);
        CHECK(a[i].rul == b[i].rul);
        CHECK(a[i].rul.back() == 0.0);
        CHECK(a[i].readings.rows() >= 120);
        CHECK(a[i].readings.rows() <= 250);
        CHECK(a[i].readings.cols() == 3);
        CHECK(a[i].timesteps.front() == 1);
        const auto& v = a[i].readings.values();
        CHECK(*std::min_element(v.begin(), v.end()) >= 0.0);
        CHECK(*std::max_element(v.begin(), v.end()) <= 1.0);
    }
}

TEST_CASE("synthetic text corpus") {
    const auto a = synth_text_corpus(50, 3);
    const auto b = synth_text_corpus(50, 3);
    REQUIRE(a.size() == 50);
    int spam = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(a[i].text == b[i].text);
        CHECK(a[i].label == b[i].label);
        CHECK(!a[i].text.empty());
        spam += a[i].label;
    }
    CHECK(spam > 0);
    CHECK(spam < 50);
}

TEST_CASE("csv") {
    const auto t = parse_csv("label,text\n1,\"hello, \"\"world\"\"\"\n0,\"two\nlines\"\n");
    CHECK(t.header == CsvRow{"label", "text"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "hello, \"world\"");
    CHECK(t.rows[1][1] == "two\nlines");
    CHECK(t.column("text") == 1);
    CHECK_THROWS_AS(t.column("missing"), ValidationError);
    CHECK_THROWS_AS(parse_csv("a,b\n1,\"open\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), ValidationError);
    CHECK(csv_escape("x,y") == "\"x,y\"");
    CHECK(csv_escape("plain") == "plain");
    for (double v : {0.1, 1.0 / 3.0, -2.5e-12, 1e300, 0.0})
        CHECK(parse_double(format_double(v), "v") == v);
    CHECK_THROWS_AS(parse_double("abc", "v"), ValidationError);
}
