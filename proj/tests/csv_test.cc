#include "cascade/csv.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "gtest/gtest.h"

using namespace cascade;

TEST(Csv, round_trip_with_metadata_and_quoting) {
  CsvDocument doc;
  doc.set_meta("kind", "test");
  doc.set_meta("note", "a=b");
  doc.header = {"name", "value"};
  doc.rows = {{"plain", "1.5"}, {"with,comma", "-2"}, {"say \"hi\"", "3e-300"}};
  std::stringstream buffer;
  write_csv(buffer, doc);
  EXPECT_EQ(buffer.str().rfind("# schema=v1\n", 0), 0u);

  const CsvDocument back = read_csv(buffer);
  EXPECT_EQ(back.meta("kind"), "test");
  EXPECT_EQ(back.meta("note"), "a=b");
  EXPECT_FALSE(back.has_meta("missing"));
  EXPECT_EQ(back.header, doc.header);
  EXPECT_EQ(back.rows, doc.rows);
  EXPECT_DOUBLE_EQ(back.number(2, "value"), 3e-300);
  EXPECT_THROW(back.column("nope"), CsvError);
}

TEST(Csv, set_meta_overwrites) {
  CsvDocument doc;
  doc.set_meta("k", "1");
  doc.set_meta("k", "2");
  ASSERT_EQ(doc.metadata.size(), 1u);
  EXPECT_EQ(doc.meta("k"), "2");
}

TEST(Csv, rejects_missing_or_unknown_schema) {
  std::istringstream none("a,b\n1,2\n");
  EXPECT_THROW(read_csv(none), CsvError);
  std::istringstream wrong("# schema=v9\na,b\n");
  EXPECT_THROW(read_csv(wrong), CsvError);
  std::istringstream late("# kind=x\n# schema=v1\na\n");
  EXPECT_THROW(read_csv(late), CsvError);
  std::istringstream headless("# schema=v1\n");
  EXPECT_THROW(read_csv(headless), CsvError);
}

TEST(Csv, rejects_ragged_rows_and_open_quotes) {
  std::istringstream ragged("# schema=v1\na,b\n1,2,3\n");
  EXPECT_THROW(read_csv(ragged), CsvError);
  std::istringstream open("# schema=v1\na\n\"unterminated\n");
  EXPECT_THROW(read_csv(open), CsvError);
}

TEST(Csv, accepts_crlf) {
  std::istringstream in("# schema=v1\r\na,b\r\n1,2\r\n");
  const CsvDocument doc = read_csv(in);
  EXPECT_EQ(doc.header.back(), "b");
  EXPECT_DOUBLE_EQ(doc.number(0, "b"), 2.0);
}

TEST(Csv, doubles_round_trip_exactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-308, 6.02214076e23, std::numeric_limits<double>::max()}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_TRUE(std::isinf(parse_double("inf")));
  EXPECT_DOUBLE_EQ(parse_double("+4"), 4.0);
  EXPECT_THROW(parse_double("1.0x"), CsvError);
  EXPECT_THROW(parse_double(""), CsvError);
}
