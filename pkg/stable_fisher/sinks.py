"""Table sinks, which handle writing result rows as CSV or JSON."""

from __future__ import annotations

import abc
import csv
import math
import typing as t
from decimal import Decimal

import simplejson

if t.TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

SIGNIFICANT_FORMAT = ".17g"


def format_number(value: float) -> str:
    """Render a float with 17 significant digits; infinities as ``inf``/``-inf``."""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, SIGNIFICANT_FORMAT)


def format_cell(value: t.Any) -> str:
    """Render one CSV cell."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_number(value)
    return str(value)


def json_value(value: t.Any) -> t.Any:
    """Convert a value for simplejson.

    Finite floats become Decimals carrying exactly 17 significant digits;
    non-finite floats become the strings ``inf``, ``-inf`` and ``nan``.
    """
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if math.isfinite(value):
            return Decimal(format_number(value))
        return format_number(value)
    if isinstance(value, dict):
        return {k: json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_value(v) for v in value]
    return value


class TableSink(abc.ABC):
    """Base sink: collects rows of one table and writes them to a stream.

    Rows are dictionaries keyed by column; they are written in the order
    received, with columns in the declared order.
    """

    def __init__(
        self,
        stream: t.TextIO,
        columns: Sequence[str],
        meta: dict[str, t.Any],
    ) -> None:
        """Initialize the sink.

        Args:
            stream: Text stream the table is written to.
            columns: Column names in output order.
            meta: Run metadata written ahead of the rows.
        """
        self.stream = stream
        self.columns = list(columns)
        self.meta = dict(meta)
        self._started = False

    def setup(self) -> None:
        """Write anything that precedes the rows."""
        self._started = True

    @abc.abstractmethod
    def process_batch(self, context: dict) -> None:
        """Write a batch of rows found under ``context["records"]``."""

    def finalize(self) -> None:
        """Write anything that follows the rows."""

    def write_all(self, records: Iterable[dict[str, t.Any]]) -> None:
        """Set up, write every record as one batch and finalize."""
        if not self._started:
            self.setup()
        self.process_batch({"records": list(records)})
        self.finalize()

    def _check_columns(self, record: dict[str, t.Any]) -> None:
        missing = [c for c in self.columns if c not in record]
        if missing:
            msg = f"record is missing columns {missing}"
            raise KeyError(msg)


class CsvSink(TableSink):
    """Comma separated rows behind ``#`` metadata lines and a header row."""

    def setup(self) -> None:
        """Write the metadata lines and the header row."""
        super().setup()
        for key in sorted(self.meta):
            self.stream.write(f"# {key}: {format_cell(self.meta[key])}\n")
        self._writer = csv.writer(self.stream, lineterminator="\n")
        self._writer.writerow(self.columns)

    def process_batch(self, context: dict) -> None:
        """Write one CSV line per record."""
        for record in context["records"]:
            self._check_columns(record)
            self._writer.writerow([format_cell(record[c]) for c in self.columns])


class JsonSink(TableSink):
    """One JSON object ``{"meta": ..., "rows": [...]}`` with sorted keys."""

    def setup(self) -> None:
        """Start collecting rows."""
        super().setup()
        self._rows: list[dict[str, t.Any]] = []

    def process_batch(self, context: dict) -> None:
        """Buffer the records; the object is written on finalize."""
        for record in context["records"]:
            self._check_columns(record)
            self._rows.append({c: record[c] for c in self.columns})

    def finalize(self) -> None:
        """Write the whole document."""
        document = {"meta": json_value(self.meta), "rows": json_value(self._rows)}
        self.stream.write(
            simplejson.dumps(document, use_decimal=True, sort_keys=True, indent=2)
        )
        self.stream.write("\n")


SINKS: dict[str, type[TableSink]] = {"csv": CsvSink, "json": JsonSink}


def make_sink(
    output_format: str,
    stream: t.TextIO,
    columns: Sequence[str],
    meta: dict[str, t.Any],
) -> TableSink:
    """Return the sink for ``csv`` or ``json``."""
    try:
        sink_class = SINKS[output_format]
    except KeyError:
        msg = f"unknown format {output_format!r}, expected one of {sorted(SINKS)}"
        raise ValueError(msg) from None
    return sink_class(stream, columns, meta)
