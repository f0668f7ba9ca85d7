"""
LOBSTER ingestion
Parses message/orderbook file pairs and builds the order disbalance event series
"""

import re
from dataclasses import dataclass
from datetime import date
from decimal import Decimal
from enum import IntEnum
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple, Union, overload

import numpy as np
import pandas as pd

from analysis.errors import EmptyInputError, LobsterFormatError, MissingDataError, SeriesKindError
from analysis.series import Series, SeriesKind, SeriesMeta

NANOS_PER_SECOND = 1_000_000_000
MESSAGE_COLUMNS = ["time", "event_type", "order_id", "size", "price", "direction"]
DEFAULT_DEPTH = 10

_INTEGER = r"[+-]?\d+"
_TIME = r"\d+(?:\.\d{1,9})?"
_TOKENIZER_LINE = re.compile(r"line (\d+)")


class EventType(IntEnum):
    """LOBSTER event codes"""
    SUBMISSION = 1
    CANCELLATION = 2
    DELETION = 3
    EXECUTION_VISIBLE = 4
    EXECUTION_HIDDEN = 5
    CROSS = 6
    HALT = 7


class Direction(IntEnum):
    BUY = 1
    SELL = -1


@dataclass(frozen=True)
class LobEvent:
    """One LOB-updating event from a message file"""
    time: Decimal
    event_type: EventType
    order_id: int
    size: int
    price: int
    direction: Direction

    def to_row(self) -> str:
        """Render in the LOBSTER message layout"""
        return ",".join([
            format_time(time_to_nanos(self.time)),
            str(int(self.event_type)),
            str(self.order_id),
            str(self.size),
            str(self.price),
            str(int(self.direction)),
        ])


@dataclass(frozen=True)
class BookLevel:
    ask_price: int
    ask_size: int
    bid_price: int
    bid_size: int


@dataclass(frozen=True)
class BookSnapshot:
    """Book state after one event: exactly ``depth`` price levels"""
    levels: Tuple[BookLevel, ...]

    def __post_init__(self):
        levels = tuple(self.levels)
        if not levels:
            raise ValueError("snapshot needs at least one level")
        object.__setattr__(self, "levels", levels)
        for number, level in enumerate(levels, start=1):
            if level.ask_size < 0 or level.bid_size < 0:
                raise ValueError(f"negative size at level {number}")
        problem = _level_order_problem(
            np.array([[lv.ask_price, lv.ask_size, lv.bid_price, lv.bid_size] for lv in levels], dtype=np.int64)
        )
        if problem:
            raise ValueError(problem)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def bid_volume(self) -> int:
        return sum(level.bid_size for level in self.levels)

    @property
    def ask_volume(self) -> int:
        return sum(level.ask_size for level in self.levels)

    def to_row(self) -> str:
        return ",".join(
            f"{lv.ask_price},{lv.ask_size},{lv.bid_price},{lv.bid_size}" for lv in self.levels
        )


class MessageLog(Sequence[LobEvent]):
    """Column store of parsed events, indexable as a sequence of LobEvent"""

    def __init__(self, times_ns: np.ndarray, event_types: np.ndarray, order_ids: np.ndarray,
                 sizes: np.ndarray, prices: np.ndarray, directions: np.ndarray):
        self.times_ns = times_ns
        self.event_types = event_types
        self.order_ids = order_ids
        self.sizes = sizes
        self.prices = prices
        self.directions = directions
        for column in (times_ns, event_types, order_ids, sizes, prices, directions):
            column.setflags(write=False)

    def __len__(self) -> int:
        return len(self.times_ns)

    @overload
    def __getitem__(self, index: int) -> LobEvent: ...

    @overload
    def __getitem__(self, index: slice) -> List[LobEvent]: ...

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        return LobEvent(
            time=nanos_to_time(int(self.times_ns[index])),
            event_type=EventType(int(self.event_types[index])),
            order_id=int(self.order_ids[index]),
            size=int(self.sizes[index]),
            price=int(self.prices[index]),
            direction=Direction(int(self.directions[index])),
        )


class OrderBook(Sequence[BookSnapshot]):
    """Column store of snapshots; ``data`` has shape (rows, depth, 4)"""

    def __init__(self, data: np.ndarray):
        if data.ndim != 3 or data.shape[2] != 4:
            raise ValueError(f"orderbook data must have shape (rows, depth, 4), got {data.shape}")
        self.data = data
        self.data.setflags(write=False)

    @property
    def depth(self) -> int:
        return self.data.shape[1]

    @property
    def ask_sizes(self) -> np.ndarray:
        return self.data[:, :, 1]

    @property
    def bid_sizes(self) -> np.ndarray:
        return self.data[:, :, 3]

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        row = self.data[index]
        return BookSnapshot(tuple(BookLevel(*(int(v) for v in level)) for level in row))

    def __iter__(self) -> Iterator[BookSnapshot]:
        for i in range(len(self)):
            yield self[i]


@dataclass(frozen=True)
class DayFiles:
    """Paired LOBSTER files for one (ticker, day)"""
    ticker: str
    day: str
    message_path: Path
    orderbook_path: Path


def time_to_nanos(value: Decimal) -> int:
    return int((Decimal(value) * NANOS_PER_SECOND).to_integral_exact())


def nanos_to_time(nanos: int) -> Decimal:
    return Decimal(nanos).scaleb(-9)


def format_time(nanos: int) -> str:
    seconds, fraction = divmod(nanos, NANOS_PER_SECOND)
    return f"{seconds}.{fraction:09d}"


def _read_rows(path: Union[str, Path], n_columns: int) -> pd.DataFrame:
    """Read a headerless CSV as strings, rejecting rows of the wrong width"""
    path = Path(path)
    try:
        frame = pd.read_csv(
            path,
            header=None,
            names=list(range(n_columns + 1)),
            dtype=str,
            skip_blank_lines=False,
        )
    except pd.errors.EmptyDataError:
        raise EmptyInputError("input")
    except pd.errors.ParserError as e:
        match = _TOKENIZER_LINE.search(str(e))
        line = int(match.group(1)) if match else 0
        raise LobsterFormatError(path, line, f"expected {n_columns} columns")
    if frame.empty:
        raise EmptyInputError("input")

    widths = frame.iloc[:, :n_columns].notna().sum(axis=1) + frame.iloc[:, n_columns].notna()
    bad = (frame.iloc[:, :n_columns].isna().any(axis=1)) | frame.iloc[:, n_columns].notna()
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise LobsterFormatError(path, row + 1, f"expected {n_columns} columns, found {int(widths.iloc[row])}")
    return frame.iloc[:, :n_columns]


def _integer_column(path: Path, column: pd.Series, name: str) -> np.ndarray:
    text = column.str.strip()
    ok = text.str.fullmatch(_INTEGER)
    if not ok.all():
        row = int(np.flatnonzero(~ok.to_numpy())[0])
        raise LobsterFormatError(path, row + 1, f"unparsable {name} {column.iloc[row]!r}")
    return text.astype(np.int64).to_numpy()


def _time_column(path: Path, column: pd.Series) -> np.ndarray:
    text = column.str.strip()
    ok = text.str.fullmatch(_TIME)
    if not ok.all():
        row = int(np.flatnonzero(~ok.to_numpy())[0])
        raise LobsterFormatError(path, row + 1, f"unparsable time {column.iloc[row]!r}")
    parts = text.str.split(".", n=1, expand=True)
    seconds = parts[0].astype(np.int64).to_numpy()
    if parts.shape[1] > 1:
        fraction = parts[1].fillna("").str.ljust(9, "0").astype(np.int64).to_numpy()
    else:
        fraction = np.zeros(len(seconds), dtype=np.int64)
    return seconds * NANOS_PER_SECOND + fraction


def parse_messages(path: Union[str, Path]) -> MessageLog:
    """Parse a LOBSTER message file: 6 columns, no header"""
    path = Path(path)
    frame = _read_rows(path, len(MESSAGE_COLUMNS))

    times = _time_column(path, frame[0])
    event_types = _integer_column(path, frame[1], "event type")
    order_ids = _integer_column(path, frame[2], "order id")
    sizes = _integer_column(path, frame[3], "size")
    prices = _integer_column(path, frame[4], "price")
    directions = _integer_column(path, frame[5], "direction")

    checks = [
        ((event_types < 1) | (event_types > 7), "event type outside 1..7"),
        (sizes < 0, "negative size"),
        (~np.isin(directions, (1, -1)), "direction must be 1 or -1"),
    ]
    for mask, reason in checks:
        if mask.any():
            raise LobsterFormatError(path, int(np.flatnonzero(mask)[0]) + 1, reason)
    backwards = np.flatnonzero(np.diff(times) < 0)
    if backwards.size:
        raise LobsterFormatError(path, int(backwards[0]) + 2, "time decreases")

    return MessageLog(times, event_types.astype(np.int8), order_ids, sizes, prices, directions.astype(np.int8))


def _level_order_problem(levels: np.ndarray) -> Optional[str]:
    """Check price ordering over adjacent occupied levels of one snapshot (depth, 4)"""
    problems = _level_order_rows(levels[np.newaxis, :, :])
    if problems.size:
        return "level prices out of order"
    return None


def _level_order_rows(data: np.ndarray) -> np.ndarray:
    """Rows whose occupied levels violate ask-increasing / bid-decreasing order"""
    if data.shape[1] < 2:
        return np.empty(0, dtype=np.int64)
    ask_p, ask_s, bid_p, bid_s = (data[:, :, i] for i in range(4))
    ask_pairs = (ask_s[:, :-1] > 0) & (ask_s[:, 1:] > 0)
    bid_pairs = (bid_s[:, :-1] > 0) & (bid_s[:, 1:] > 0)
    ask_bad = ask_pairs & (np.diff(ask_p, axis=1) <= 0)
    bid_bad = bid_pairs & (np.diff(bid_p, axis=1) >= 0)
    return np.flatnonzero((ask_bad | bid_bad).any(axis=1))


def parse_orderbook(path: Union[str, Path], depth: int = DEFAULT_DEPTH) -> OrderBook:
    """Parse a LOBSTER orderbook file with 4 x depth columns per row"""
    if depth < 1:
        raise ValueError(f"depth must be positive, got {depth}")
    path = Path(path)
    frame = _read_rows(path, 4 * depth)

    columns = [_integer_column(path, frame[i], _orderbook_column_name(i)) for i in range(4 * depth)]
    data = np.stack(columns, axis=1).reshape(len(frame), depth, 4)

    negative = np.flatnonzero((data[:, :, 1] < 0).any(axis=1) | (data[:, :, 3] < 0).any(axis=1))
    if negative.size:
        raise LobsterFormatError(path, int(negative[0]) + 1, "negative size")
    disordered = _level_order_rows(data)
    if disordered.size:
        raise LobsterFormatError(path, int(disordered[0]) + 1, "level prices out of order")

    return OrderBook(data)


def _orderbook_column_name(index: int) -> str:
    level, field_index = divmod(index, 4)
    return f"{('AskPrice', 'AskSize', 'BidPrice', 'BidSize')[field_index]}{level + 1}"


def write_messages(path: Union[str, Path], events: Sequence[LobEvent]) -> Path:
    """Serialize events in LOBSTER message layout"""
    path = Path(path)
    path.write_text("".join(event.to_row() + "\n" for event in events))
    return path


def write_orderbook(path: Union[str, Path], snapshots: Sequence[BookSnapshot]) -> Path:
    """Serialize snapshots in LOBSTER orderbook layout"""
    path = Path(path)
    path.write_text("".join(snapshot.to_row() + "\n" for snapshot in snapshots))
    return path


def build_disbalance(snapshots: Sequence[BookSnapshot], meta: Optional[SeriesMeta] = None) -> Series:
    """X(j): total bid volume minus total ask volume over all levels of snapshot j"""
    if len(snapshots) == 0:
        raise EmptyInputError("snapshot sequence")
    if isinstance(snapshots, OrderBook):
        values = snapshots.bid_sizes.sum(axis=1) - snapshots.ask_sizes.sum(axis=1)
    else:
        values = np.array([s.bid_volume - s.ask_volume for s in snapshots], dtype=np.int64)
    return Series(values, SeriesKind.EMPIRICAL, meta or SeriesMeta(source="order disbalance"))


def increments(series: Series) -> Series:
    """Y(i) = X(i+1) - X(i)"""
    if len(series) < 2:
        raise ValueError(f"increments need at least 2 samples, got {len(series)}")
    series.require_path("increments")
    return series.with_values(np.diff(series.values), SeriesKind.INCREMENTS, True, "increments")


def join_daily(series_list: Sequence[Series]) -> Series:
    """Concatenate per-day increment series; overnight gaps never produce an increment"""
    if not series_list:
        raise EmptyInputError("series list")
    ticker = series_list[0].meta.ticker
    daily: List[np.ndarray] = []
    previous_date = ""
    for series in series_list:
        if series.meta.ticker != ticker:
            raise ValueError(f"ticker mismatch: {series.meta.ticker!r} != {ticker!r}")
        if previous_date and series.meta.start_date and series.meta.start_date < previous_date:
            raise ValueError(f"daily series out of order: {series.meta.start_date} after {previous_date}")
        previous_date = series.meta.start_date or previous_date
        if series.kind is SeriesKind.EMPIRICAL:
            daily.append(increments(series).values)
        elif series.kind is SeriesKind.INCREMENTS:
            daily.append(series.values)
        else:
            raise SeriesKindError(f"join_daily takes empirical or increment series, got {series.label}")

    if len(series_list) == 1 and series_list[0].kind is SeriesKind.INCREMENTS:
        return series_list[0]
    first, last = series_list[0].meta, series_list[-1].meta
    meta = SeriesMeta(
        ticker=ticker,
        start_date=first.start_date,
        end_date=last.end_date or last.start_date,
        source="joined daily increments",
        extra={"days": len(series_list)},
    )
    return Series(np.concatenate(daily), SeriesKind.INCREMENTS, meta, True)


def joint_path(series_list: Sequence[Series]) -> Series:
    """Joint X over several days: first opening level plus the joined increments"""
    joined = join_daily(series_list)
    opening = series_list[0].values[0] if series_list[0].kind is SeriesKind.EMPIRICAL else 0
    values = np.concatenate([[opening], opening + np.cumsum(joined.values)])
    return joined.with_values(values, SeriesKind.EMPIRICAL, False, "joint order disbalance")


_FILE_PATTERN = r"^{ticker}_(\d{{4}}-\d{{2}}-\d{{2}})_\d+_\d+_(message|orderbook)_(\d+)\.csv$"


def discover_day_files(data_root: Union[str, Path], ticker: str, depth: int = DEFAULT_DEPTH,
                       date_range: Optional[Tuple[str, str]] = None) -> List[DayFiles]:
    """Find paired message/orderbook files for a ticker, ordered by day"""
    root = Path(data_root)
    pattern = re.compile(_FILE_PATTERN.format(ticker=re.escape(ticker)))
    found = {}
    for candidate in sorted(root.rglob(f"{ticker}_*.csv")):
        match = pattern.match(candidate.name)
        if not match or int(match.group(3)) != depth:
            continue
        day = match.group(1)
        if date_range and ((date_range[0] and day < date_range[0]) or (date_range[1] and day > date_range[1])):
            continue
        try:
            date.fromisoformat(day)
        except ValueError:
            continue
        found.setdefault(day, {})[match.group(2)] = candidate

    gaps = []
    pairs = []
    for day in sorted(found):
        halves = found[day]
        for half in ("message", "orderbook"):
            if half not in halves:
                gaps.append(f"{day}: {half} file missing")
        if len(halves) == 2:
            pairs.append(DayFiles(ticker, day, halves["message"], halves["orderbook"]))

    if not found:
        span = f" between {date_range[0] or 'start'} and {date_range[1] or 'end'}" if date_range and any(date_range) else ""
        gaps.append(f"no {depth}-level LOBSTER files under {root}{span}")
    if gaps:
        raise MissingDataError(ticker, gaps)
    return pairs


def load_day(files: DayFiles, depth: int = DEFAULT_DEPTH) -> Series:
    """Parse one (ticker, day) pair into its empirical disbalance series"""
    messages = parse_messages(files.message_path)
    book = parse_orderbook(files.orderbook_path, depth)
    if len(messages) != len(book):
        raise LobsterFormatError(
            files.orderbook_path,
            min(len(messages), len(book)) + 1,
            f"orderbook has {len(book)} rows but message file has {len(messages)}",
        )
    meta = SeriesMeta(
        ticker=files.ticker,
        start_date=files.day,
        end_date=files.day,
        source=f"order disbalance, {depth} levels",
        extra={"events": len(messages)},
    )
    return build_disbalance(book, meta)
