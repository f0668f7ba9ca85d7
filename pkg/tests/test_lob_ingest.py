"""
Unit tests for LOBSTER ingestion and the order disbalance series
"""

import os
import sys
import tempfile
import unittest
from decimal import Decimal
from pathlib import Path

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.errors import EmptyInputError, LobsterFormatError, MissingDataError
from analysis.lob_ingest import (
    BookLevel,
    BookSnapshot,
    Direction,
    EventType,
    build_disbalance,
    discover_day_files,
    increments,
    join_daily,
    joint_path,
    load_day,
    parse_messages,
    parse_orderbook,
    write_messages,
    write_orderbook,
)
from analysis.series import Series, SeriesKind, SeriesMeta

MESSAGES = (
    "34200.000000001,1,11885113,21,2238100,1\n"
    "34200.004241000,1,11534792,26,2238200,1\n"
    "34200.025552000,2,11885113,5,2238100,1\n"
    "34200.201743000,3,11534792,26,2238200,1\n"
    "34200.201743000,4,11885113,16,2238100,1\n"
)
ORDERBOOK_DEPTH2 = (
    "2239500,100,2238100,21,2239600,5,2237500,10\n"
    "2239500,100,2238200,26,2239600,5,2238100,21\n"
    "2239500,100,2238200,26,2239600,5,2238100,16\n"
    "2239500,100,2238100,16,2239600,5,2237500,10\n"
    "2239500,100,2237500,10,2239600,5,0,0\n"
)


def snapshot(*levels):
    return BookSnapshot(tuple(BookLevel(*level) for level in levels))


class TestParseMessages(unittest.TestCase):
    """Test message file parsing"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = self.root / name
        path.write_text(text)
        return path

    def test_parses_fixture_rows(self):
        """Five events parse to exact records in file order"""
        log = parse_messages(self.write("m.csv", MESSAGES))
        self.assertEqual(len(log), 5)
        first = log[0]
        self.assertEqual(first.time, Decimal("34200.000000001"))
        self.assertEqual(first.event_type, EventType.SUBMISSION)
        self.assertEqual(first.order_id, 11885113)
        self.assertEqual(first.size, 21)
        self.assertEqual(first.price, 2238100)
        self.assertEqual(first.direction, Direction.BUY)
        self.assertEqual([e.event_type for e in log], [1, 1, 2, 3, 4])
        self.assertEqual(log[4].time, Decimal("34200.201743"))

    def test_empty_file(self):
        """Empty file is rejected"""
        with self.assertRaises(EmptyInputError) as ctx:
            parse_messages(self.write("m.csv", ""))
        self.assertIn("empty input", str(ctx.exception))

    def test_short_row_names_line(self):
        """Row with five columns reports its line number"""
        text = MESSAGES.splitlines()
        text[2] = "34200.025552000,2,11885113,5,2238100"
        with self.assertRaises(LobsterFormatError) as ctx:
            parse_messages(self.write("m.csv", "\n".join(text) + "\n"))
        self.assertEqual(ctx.exception.line, 3)
        self.assertIn("line 3", str(ctx.exception))

    def test_unparsable_number_names_line(self):
        """Non-numeric size reports its line number"""
        text = MESSAGES.splitlines()
        text[1] = "34200.004241000,1,11534792,abc,2238200,1"
        with self.assertRaises(LobsterFormatError) as ctx:
            parse_messages(self.write("m.csv", "\n".join(text) + "\n"))
        self.assertEqual(ctx.exception.line, 2)

    def test_invalid_fields(self):
        """Event type, size, direction and time order are checked"""
        bad_rows = {
            "34200.1,8,1,1,1,1": "event type",
            "34200.1,1,1,-1,1,1": "negative size",
            "34200.1,1,1,1,1,0": "direction",
        }
        for row, reason in bad_rows.items():
            with self.subTest(row=row):
                with self.assertRaises(LobsterFormatError) as ctx:
                    parse_messages(self.write("m.csv", row + "\n"))
                self.assertIn(reason, str(ctx.exception))
        with self.assertRaises(LobsterFormatError) as ctx:
            parse_messages(self.write("m.csv", "34200.5,1,1,1,1,1\n34200.4,1,1,1,1,1\n"))
        self.assertEqual(ctx.exception.line, 2)

    def test_serialize_reproduces_fixture(self):
        """Writing parsed events reproduces the file byte for byte"""
        log = parse_messages(self.write("m.csv", MESSAGES))
        out = write_messages(self.root / "copy.csv", list(log))
        self.assertEqual(out.read_text(), MESSAGES)


class TestParseOrderbook(unittest.TestCase):
    """Test orderbook file parsing"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = self.root / name
        path.write_text(text)
        return path

    def test_depth_one(self):
        book = parse_orderbook(self.write("o.csv", "2239500,100,2238100,21\n"), depth=1)
        self.assertEqual(len(book), 1)
        level = book[0].levels[0]
        self.assertEqual((level.ask_price, level.ask_size), (2239500, 100))
        self.assertEqual((level.bid_price, level.bid_size), (2238100, 21))

    def test_zero_sizes(self):
        """Padding levels with zero size are accepted"""
        row = ",".join(["9999999999", "0", "-9999999999", "0"] * 10)
        book = parse_orderbook(self.write("o.csv", row + "\n"), depth=10)
        self.assertEqual(book[0].bid_volume, 0)
        self.assertEqual(book[0].ask_volume, 0)

    def test_wrong_column_count(self):
        row = ",".join(["1"] * 36)
        with self.assertRaises(LobsterFormatError) as ctx:
            parse_orderbook(self.write("o.csv", row + "\n"), depth=10)
        self.assertEqual(ctx.exception.line, 1)

    def test_negative_size(self):
        with self.assertRaises(LobsterFormatError):
            parse_orderbook(self.write("o.csv", "2239500,-1,2238100,21\n"), depth=1)

    def test_serialize_reproduces_fixture(self):
        book = parse_orderbook(self.write("o.csv", ORDERBOOK_DEPTH2), depth=2)
        out = write_orderbook(self.root / "copy.csv", list(book))
        self.assertEqual(out.read_text(), ORDERBOOK_DEPTH2)


class TestDisbalance(unittest.TestCase):
    """Test disbalance and increment construction"""

    def test_hand_sum(self):
        """Bids {21, 10} and asks {100, 5} give 31 - 105"""
        x = build_disbalance([snapshot((2239500, 100, 2238100, 21), (2239600, 5, 2237500, 10))])
        self.assertEqual(x.kind, SeriesKind.EMPIRICAL)
        self.assertEqual(x.values.tolist(), [-74])

    def test_symmetric_book_is_zero(self):
        x = build_disbalance([snapshot((101, 7, 100, 7), (102, 3, 99, 3))])
        self.assertEqual(x.values.tolist(), [0])

    def test_swap_bid_and_ask_negates(self):
        original = [snapshot((101, 7, 100, 2), (102, 3, 99, 9)), snapshot((101, 1, 100, 4), (102, 0, 0, 0))]
        swapped = [
            BookSnapshot(tuple(BookLevel(lv.ask_price, lv.bid_size, lv.bid_price, lv.ask_size) for lv in s.levels))
            for s in original
        ]
        np.testing.assert_array_equal(build_disbalance(swapped).values, -build_disbalance(original).values)

    def test_order_and_length_preserved(self):
        x = build_disbalance([snapshot((101, 1, 100, 5)), snapshot((101, 9, 100, 2))])
        self.assertEqual(x.values.tolist(), [4, -7])

    def test_empty_input(self):
        with self.assertRaises(EmptyInputError):
            build_disbalance([])

    def test_parsed_book_matches_hand_sums(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "o.csv"
            path.write_text(ORDERBOOK_DEPTH2)
            x = build_disbalance(parse_orderbook(path, depth=2))
        self.assertEqual(x.values.tolist(), [31 - 105, 47 - 105, 42 - 105, 26 - 105, 10 - 105])

    def test_increments(self):
        y = increments(Series([0, 3, 1], SeriesKind.EMPIRICAL))
        self.assertEqual(y.values.tolist(), [3, -2])
        self.assertEqual(y.kind, SeriesKind.INCREMENTS)
        self.assertTrue(y.is_increments)
        self.assertEqual(increments(Series([5, 5, 5, 5], SeriesKind.EMPIRICAL)).values.tolist(), [0, 0, 0])
        with self.assertRaises(ValueError):
            increments(Series([1], SeriesKind.EMPIRICAL))

    def test_cumsum_of_increments_recovers_path(self):
        x = np.array([4, -3, 10, 10, 2, 7], dtype=np.int64)
        y = increments(Series(x, SeriesKind.EMPIRICAL))
        np.testing.assert_array_equal(np.cumsum(y.values), x[1:] - x[0])


class TestJoinDaily(unittest.TestCase):
    """Test joining days at the increment level"""

    def day(self, values, date, ticker="CSCO"):
        return Series(values, SeriesKind.EMPIRICAL, SeriesMeta(ticker=ticker, start_date=date, end_date=date))

    def test_lengths_add(self):
        a = Series(np.ones(100), SeriesKind.INCREMENTS, SeriesMeta(ticker="A", start_date="2012-06-21"))
        b = Series(np.ones(50), SeriesKind.INCREMENTS, SeriesMeta(ticker="A", start_date="2012-06-22"))
        self.assertEqual(len(join_daily([a, b])), 150)

    def test_single_day_identity(self):
        a = Series(np.arange(5.0), SeriesKind.INCREMENTS, SeriesMeta(ticker="A"))
        self.assertIs(join_daily([a]), a)

    def test_overnight_jump_skipped(self):
        """Two 2-point days give exactly two increments"""
        joined = join_daily([self.day([0, 1], "2012-06-21"), self.day([1000, 998], "2012-06-22")])
        self.assertEqual(joined.values.tolist(), [1, -2])
        self.assertEqual(joined.meta.start_date, "2012-06-21")
        self.assertEqual(joined.meta.end_date, "2012-06-22")

    def test_joint_path_starts_at_first_open(self):
        path = joint_path([self.day([5, 6], "2012-06-21"), self.day([1000, 998], "2012-06-22")])
        self.assertEqual(path.values.tolist(), [5, 6, 4])

    def test_ticker_mismatch(self):
        with self.assertRaises(ValueError):
            join_daily([self.day([0, 1], "2012-06-21"), self.day([0, 1], "2012-06-22", ticker="AAPL")])


class TestDiscovery(unittest.TestCase):
    """Test locating day file pairs"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def add_day(self, day, depth=2, halves=("message", "orderbook")):
        contents = {"message": MESSAGES, "orderbook": ORDERBOOK_DEPTH2}
        for half in halves:
            (self.root / f"CSCO_{day}_34200000_57600000_{half}_{depth}.csv").write_text(contents[half])

    def test_pairs_ordered_by_day(self):
        self.add_day("2012-06-22")
        self.add_day("2012-06-21")
        files = discover_day_files(self.root, "CSCO", depth=2)
        self.assertEqual([f.day for f in files], ["2012-06-21", "2012-06-22"])

    def test_date_range_filters(self):
        for day in ("2012-06-20", "2012-06-21", "2012-06-22"):
            self.add_day(day)
        files = discover_day_files(self.root, "CSCO", depth=2, date_range=("2012-06-21", ""))
        self.assertEqual([f.day for f in files], ["2012-06-21", "2012-06-22"])

    def test_missing_half_listed(self):
        self.add_day("2012-06-21")
        self.add_day("2012-06-22", halves=("message",))
        with self.assertRaises(MissingDataError) as ctx:
            discover_day_files(self.root, "CSCO", depth=2)
        self.assertEqual(ctx.exception.gaps, ["2012-06-22: orderbook file missing"])

    def test_no_files(self):
        with self.assertRaises(MissingDataError):
            discover_day_files(self.root, "CSCO", depth=10)

    def test_load_day(self):
        self.add_day("2012-06-21")
        x = load_day(discover_day_files(self.root, "CSCO", depth=2)[0], depth=2)
        self.assertEqual(x.meta.ticker, "CSCO")
        self.assertEqual(x.meta.start_date, "2012-06-21")
        self.assertEqual(len(x), 5)
        self.assertEqual(x.values[0], -74)


if __name__ == "__main__":
    unittest.main(verbosity=2)
