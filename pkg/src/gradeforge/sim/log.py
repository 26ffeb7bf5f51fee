"""Record log container and serialization.

A run produces an ordered stream of per-channel records. On disk the stream
is a little-endian binary file:

    magic   4 bytes  b"GRLG"
    version u16
    hlen    u32      byte length of the UTF-8 header text
    header  hlen bytes of structured text (config, schedule, channel table)
    records, each framed as
        length  u32   bytes that follow in this frame
        channel u16   id from the header channel table
        index   u64   per-channel sequence number, gap free from zero
        stamp   f64   simulation time in seconds
        payload length - 18 bytes

A JSON-lines mirror of the same stream round-trips losslessly for manual
inspection, and the camera pose channel can be exported as plain
``stamp tx ty tz qx qy qz qw`` text.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass, field

import yaml

from .config import CHANNEL_ORDER, ConfigError, SimConfig

MAGIC = b"GRLG"
FORMAT_VERSION = 1

_FRAME_HEAD = struct.Struct("<HQd")


class LogError(ValueError):
    """Raised when a log file is malformed or fails an integrity check."""


def base_channel(name: str) -> str:
    """Channel name with any `namespace/` prefix removed."""
    return name.rsplit("/", 1)[-1]


def _order_key(name: str) -> int:
    base = base_channel(name)
    try:
        return CHANNEL_ORDER.index(base)
    except ValueError:
        return len(CHANNEL_ORDER)


@dataclass
class Record:
    channel: str
    index: int
    sim_time: float
    payload: bytes = b""


@dataclass
class RecordLog:
    config: SimConfig
    scene_manifest: str = ""
    namespaces: tuple = ()
    start_offset: float = 0.0
    channel_names: tuple = ()
    records: list = field(default_factory=list)

    def __post_init__(self) -> None:
        self.records = list(self.records)
        self.channel_names = tuple(self.channel_names)
        self.namespaces = tuple(self.namespaces)

    # -- channel bookkeeping -------------------------------------------------

    def channel_id(self, name: str) -> int:
        try:
            return self.channel_names.index(name)
        except ValueError:
            raise LogError(f"channel {name!r} not declared in header") from None

    def channel_rate(self, name: str) -> int:
        base = base_channel(name)
        if base == "start_experiment":
            return 0
        rates = self.config.schedule.rates
        if base not in rates:
            raise LogError(f"no rate known for channel {name!r}")
        return rates[base]

    def channel_records(self, name: str) -> list:
        return [r for r in self.records if r.channel == name]

    def counts(self) -> dict:
        out = {}
        for rec in self.records:
            out[rec.channel] = out.get(rec.channel, 0) + 1
        return out

    def append(self, record: Record) -> None:
        if record.channel not in self.channel_names:
            raise LogError(f"channel {record.channel!r} not declared in header")
        self.records.append(record)

    # -- integrity -----------------------------------------------------------

    def check_indices(self) -> None:
        """Verify every channel's indices are gap free from zero."""
        seen = {}
        for rec in self.records:
            expect = seen.get(rec.channel, 0)
            if rec.index != expect:
                raise LogError(
                    f"gap in channel {rec.channel} at index {expect}"
                )
            seen[rec.channel] = expect + 1

    def check_sorted(self) -> None:
        keys = [(r.sim_time, _order_key(r.channel)) for r in self.records]
        for prev, cur in zip(keys, keys[1:]):
            if cur < prev:
                raise LogError("records are not sorted by sim_time and channel order")

    def sort_records(self) -> None:
        order = {name: i for i, name in enumerate(self.channel_names)}
        self.records.sort(
            key=lambda r: (r.sim_time, _order_key(r.channel), order[r.channel], r.index)
        )

    # -- header --------------------------------------------------------------

    def header_dict(self) -> dict:
        return {
            "channels": list(self.channel_names),
            "namespaces": list(self.namespaces),
            "scene_manifest": self.scene_manifest,
            "sim": self.config.to_dict(),
            "start_offset": float(self.start_offset),
        }

    @staticmethod
    def from_header(header: dict, records=()) -> "RecordLog":
        known = {"channels", "namespaces", "scene_manifest", "sim", "start_offset"}
        unknown = set(header) - known
        if unknown:
            raise LogError(f"unknown header keys: {sorted(unknown)}")
        try:
            config = SimConfig.from_dict(header["sim"])
        except KeyError:
            raise LogError("header is missing the sim section") from None
        except ConfigError as exc:
            raise LogError(f"bad sim section in header: {exc}") from None
        return RecordLog(
            config=config,
            scene_manifest=str(header.get("scene_manifest", "")),
            namespaces=tuple(header.get("namespaces", ())),
            start_offset=float(header.get("start_offset", 0.0)),
            channel_names=tuple(header.get("channels", ())),
            records=list(records),
        )


# -- binary container --------------------------------------------------------


def _write_stream(log: RecordLog, fh) -> None:
    header = yaml.safe_dump(log.header_dict(), sort_keys=True).encode("utf-8")
    fh.write(MAGIC)
    fh.write(struct.pack("<H", FORMAT_VERSION))
    fh.write(struct.pack("<I", len(header)))
    fh.write(header)
    for rec in log.records:
        cid = log.channel_id(rec.channel)
        body = _FRAME_HEAD.pack(cid, rec.index, rec.sim_time) + rec.payload
        fh.write(struct.pack("<I", len(body)))
        fh.write(body)


def save_log(log: RecordLog, path) -> None:
    buf = io.BytesIO()
    _write_stream(log, buf)
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


def log_bytes(log: RecordLog) -> bytes:
    buf = io.BytesIO()
    _write_stream(log, buf)
    return buf.getvalue()


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise LogError(f"truncated log: short read in {what}")
    return data


def _parse_stream(fh) -> RecordLog:
    magic = fh.read(4)
    if magic != MAGIC:
        raise LogError("not a record log: bad magic")
    (version,) = struct.unpack("<H", _read_exact(fh, 2, "version"))
    if version != FORMAT_VERSION:
        raise LogError(f"unsupported log version {version}")
    (hlen,) = struct.unpack("<I", _read_exact(fh, 4, "header length"))
    try:
        header = yaml.safe_load(_read_exact(fh, hlen, "header").decode("utf-8"))
    except Exception as exc:
        raise LogError(f"unreadable log header: {exc}") from None
    if not isinstance(header, dict):
        raise LogError("log header is not a mapping")
    log = RecordLog.from_header(header)
    names = log.channel_names
    while True:
        raw = fh.read(4)
        if not raw:
            break
        if len(raw) != 4:
            raise LogError("truncated log: short read in frame length")
        (length,) = struct.unpack("<I", raw)
        if length < _FRAME_HEAD.size:
            raise LogError("corrupt frame: length too small")
        body = _read_exact(fh, length, "record frame")
        cid, index, stamp = _FRAME_HEAD.unpack_from(body)
        if cid >= len(names):
            raise LogError(f"corrupt frame: unknown channel id {cid}")
        log.records.append(
            Record(names[cid], index, stamp, body[_FRAME_HEAD.size:])
        )
    return log


def load_log(path) -> RecordLog:
    with open(path, "rb") as fh:
        return _parse_stream(fh)


def log_from_bytes(data: bytes) -> RecordLog:
    return _parse_stream(io.BytesIO(data))


# -- JSON-lines mirror -------------------------------------------------------


def save_text_log(log: RecordLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        head = {"header": log.header_dict(), "version": FORMAT_VERSION}
        fh.write(json.dumps(head, sort_keys=True) + "\n")
        for rec in log.records:
            line = {
                "channel": rec.channel,
                "index": rec.index,
                "sim_time": rec.sim_time.hex(),
                "payload": rec.payload.hex(),
            }
            fh.write(json.dumps(line, sort_keys=True) + "\n")


def load_text_log(path) -> RecordLog:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            raise LogError("empty text log")
        head = json.loads(first)
        if head.get("version") != FORMAT_VERSION:
            raise LogError(f"unsupported log version {head.get('version')}")
        log = RecordLog.from_header(head["header"])
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                rec = Record(
                    obj["channel"],
                    int(obj["index"]),
                    float.fromhex(obj["sim_time"]),
                    bytes.fromhex(obj["payload"]),
                )
            except (KeyError, ValueError) as exc:
                raise LogError(f"bad text log line {lineno}: {exc}") from None
            log.append(rec)
    return log


# -- trajectory export -------------------------------------------------------


def export_tum(log: RecordLog, channel: str, path) -> int:
    """Write a pose channel as `stamp tx ty tz qx qy qz qw` text lines."""
    records = log.channel_records(channel)
    if not records:
        raise LogError(f"channel {channel!r} has no records")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# stamp tx ty tz qx qy qz qw\n")
        for rec in records:
            vals = struct.unpack("<7d", rec.payload[:56])
            fh.write(
                " ".join([repr(float(rec.sim_time))] + [repr(float(v)) for v in vals])
                + "\n"
            )
    return len(records)
