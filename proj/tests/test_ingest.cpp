#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "elliptgof/ingest.hpp"

using namespace elliptgof;

namespace {

Dataset parse(const std::string& text, bool header, char delim = ',') {
    std::istringstream in(text);
    return parse_csv(in, header, delim, "inline");
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(ParseCsv, NumericWithoutHeader) {
    const Dataset d = parse("1,2\n3,4\n5,6\n", false);
    EXPECT_EQ(d.values.rows(), 3);
    EXPECT_EQ(d.values.cols(), 2);
    EXPECT_TRUE(d.column_labels.empty());
    EXPECT_EQ(d.values(2, 1), 6.0);
}

TEST(ParseCsv, HeaderBecomesLabels) {
    const Dataset d = parse("a,b\n1,2\n", true);
    ASSERT_EQ(d.column_labels.size(), 2u);
    EXPECT_EQ(d.column_labels[0], "a");
    EXPECT_EQ(d.column_labels[1], "b");
    EXPECT_EQ(d.values.rows(), 1);
}

TEST(ParseCsv, QuotesWhitespaceCrlfAndDelimiter) {
    const Dataset d = parse("\"x 1\";\"x 2\"\r\n 1.5 ; -2e-3 \r\n\r\n3;4\r\n", true, ';');
    EXPECT_EQ(d.column_labels[0], "x 1");
    EXPECT_EQ(d.values.rows(), 2);
    EXPECT_DOUBLE_EQ(d.values(0, 1), -2e-3);
}

TEST(ParseCsv, TextCellNamesRowAndColumn) {
    try {
        parse("1,2\n3,abc\n", false);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 2"), std::string::npos);
        EXPECT_NE(msg.find("column 2"), std::string::npos);
    }
}

TEST(ParseCsv, RaggedAndEmpty) {
    EXPECT_EQ(kind_of([] { parse("1,2\n3\n", false); }), ErrorKind::RaggedRows);
    EXPECT_EQ(kind_of([] { parse("", false); }), ErrorKind::EmptyFile);
    EXPECT_EQ(kind_of([] { parse("a,b\n", true); }), ErrorKind::EmptyFile);
}

TEST(ParseCsv, MissingValuesRejectRowsWithLineNumbers) {
    const Dataset d = parse("a,b\n1,2\nNA,3\n4,\n5,inf\n6,7\n", true);
    EXPECT_EQ(d.values.rows(), 2);
    EXPECT_TRUE(d.values.allFinite());
    EXPECT_EQ(d.rejected_rows, (std::vector<std::size_t>{3, 4, 5}));
}

TEST(LoadCsv, ReadsFileAndReportsMissingFile) {
    const std::string path = testing::TempDir() + "/ingest_load.csv";
    {
        std::ofstream out(path);
        out << "u,v,w\n1,2,3\n4,5,6\n";
    }
    const Dataset d = load_csv(path, true);
    EXPECT_EQ(d.source, path);
    EXPECT_EQ(d.values.cols(), 3);
    std::remove(path.c_str());
    EXPECT_EQ(kind_of([] { load_csv("/nonexistent/nothing.csv", false); }), ErrorKind::Io);
}

TEST(ExtractWindow, StandardizedColumns) {
    const Dataset d = parse("1,10,5\n2,20,5.5\n4,25,7\n7,40,5\n", false);
    const DataMatrix w = extract_window(d, WindowSpec::range(1, 2));
    ASSERT_EQ(w.cols(), 2);
    for (Eigen::Index j = 0; j < 2; ++j) {
        EXPECT_NEAR(w.col(j).mean(), 0.0, 1e-12);
        EXPECT_NEAR(column_sd(w.col(j)), 1.0, 1e-12);
    }
}

TEST(ExtractWindow, RawCopyWhenStandardizationOff) {
    const Dataset d = parse("1,10,5\n2,20,5.5\n4,25,7\n", false);
    WindowSpec w{{3, 1}, false};
    const DataMatrix x = extract_window(d, w);
    EXPECT_EQ(x.col(0), d.values.col(2));
    EXPECT_EQ(x.col(1), d.values.col(0));
}

TEST(ExtractWindow, ConstantColumnAndBadIndices) {
    const Dataset d = parse("1,3\n2,3\n4,3\n", false);
    try {
        extract_window(d, WindowSpec::all(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConstantColumn);
        EXPECT_EQ(e.index(), 2);
    }
    EXPECT_NO_THROW(extract_window(d, WindowSpec::all(2, false)));
    EXPECT_EQ(kind_of([&] { extract_window(d, WindowSpec{{3}, true}); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([&] { extract_window(d, WindowSpec{{}, true}); }), ErrorKind::InvalidArgument);
    EXPECT_THROW(WindowSpec::range(3, 2), Error);
    EXPECT_THROW(WindowSpec::range(0, 2), Error);
}

TEST(TopVariance, SelectsLargestRawVariance) {
    const Dataset d = parse("1,0,5,9\n2,10,5,9.5\n3,-10,5,9\n4,0,5,9.5\n", false);
    EXPECT_EQ(top_variance_columns(d, 2), (std::vector<Eigen::Index>{1, 2}));
    EXPECT_EQ(top_variance_columns(d, 1), (std::vector<Eigen::Index>{2}));
    // Constant columns are never selected, even when K exceeds the rest.
    EXPECT_EQ(top_variance_columns(d, 10), (std::vector<Eigen::Index>{1, 2, 4}));
    EXPECT_THROW(top_variance_columns(d, 0), Error);
}
