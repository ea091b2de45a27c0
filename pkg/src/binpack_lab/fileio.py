"""Line-based instance and certificate files with exact rationals.

Instance files::

    kind timed                 # or: kind plain | kind clustered k=3
    item 3/10 count=2 arrive=0/1 delay=linear:1
    item 1/2 arrive=1/3 delay=table:1/1:1/10,2/1:1/5

Certificate files (sidecar of a generated construction)::

    certificate bins=90
    size type2 28/55
    pattern count=44 type2:1 pos(3,1):1
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from ._rational import RationalParseError, fmt, parse_rational
from .clustering import ClusteredInstance
from .construction import Certificate
from .delays import DelayFunction, TimedItem
from .packing import Item, ItemClass

KINDS = ("plain", "clustered", "timed")
_FIELDS = ("count", "cluster", "arrive", "delay", "label")


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"{message} at line {line}")


@dataclass(frozen=True)
class Record:
    size: Fraction
    count: int = 1
    cluster: str | None = None
    arrive: Fraction | None = None
    delay: DelayFunction | None = None
    label: str = ""


@dataclass
class InstanceFile:
    kind: str
    records: list[Record] = field(default_factory=list)
    k: int | None = None
    warnings: list[str] = field(default_factory=list)

    def classes(self) -> list[ItemClass]:
        return [ItemClass(r.size, r.count, r.cluster, r.label) for r in self.records]

    def items(self) -> list[Item]:
        out, idx = [], 0
        for r in self.records:
            for _ in range(r.count):
                out.append(Item(r.size, idx, r.cluster, r.label))
                idx += 1
        return out

    def clustered(self) -> ClusteredInstance:
        if self.kind != "clustered":
            raise FormatError(f"instance kind is {self.kind}, not clustered")
        clusters: dict[str, list[ItemClass]] = {}
        for c in self.classes():
            clusters.setdefault(c.cluster, []).append(c)
        return ClusteredInstance(clusters, self.k)

    def timed(self) -> list[TimedItem]:
        if self.kind != "timed":
            raise FormatError(f"instance kind is {self.kind}, not timed")
        out, idx = [], 0
        for r in self.records:
            for _ in range(r.count):
                out.append(TimedItem(Item(r.size, idx, r.cluster, r.label), r.arrive, r.delay))
                idx += 1
        return out


# ---------------------------------------------------------------- parsing

def _rat(text: str, lineno: int, warnings: list[str]) -> Fraction:
    try:
        value, reduced = parse_rational(text)
    except RationalParseError as e:
        raise FormatError(str(e), lineno) from None
    if not reduced:
        warnings.append(f"line {lineno}: {text} is not in lowest terms")
    return value


def parse_delay(text: str, lineno: int = 0, warnings: list[str] | None = None) -> DelayFunction:
    warnings = [] if warnings is None else warnings
    kind, _, args = text.partition(":")
    try:
        if kind == "linear":
            return DelayFunction.linear(_rat(args, lineno, warnings))
        if kind == "power":
            rate, _, exp = args.partition(",")
            return DelayFunction.power(_rat(rate, lineno, warnings), _rat(exp, lineno, warnings))
        if kind == "table":
            points = []
            for pair in args.split(","):
                t, sep, v = pair.partition(":")
                if not sep:
                    raise FormatError(f"table breakpoint {pair!r} needs time:value", lineno)
                points.append((_rat(t, lineno, warnings), _rat(v, lineno, warnings)))
            return DelayFunction.from_table(points)
    except FormatError:
        raise
    except ValueError as e:
        raise FormatError(str(e), lineno) from None
    raise FormatError(f"unknown delay kind {kind!r}", lineno)


def _parse_header(line: str, lineno: int) -> tuple[str, int | None]:
    parts = line.split()
    if len(parts) < 2 or parts[0] != "kind" or parts[1] not in KINDS:
        raise FormatError("header must be 'kind plain|clustered|timed'", lineno)
    k = None
    for extra in parts[2:]:
        key, _, val = extra.partition("=")
        if key != "k" or not val.isdigit():
            raise FormatError(f"unexpected header field {extra!r}", lineno)
        k = int(val)
    if parts[1] == "clustered":
        k = 3 if k is None else k
        if k < 1:
            raise FormatError("k must be positive", lineno)
    elif k is not None:
        raise FormatError("k is only allowed for clustered instances", lineno)
    return parts[1], k


def parse_instance(text: str) -> InstanceFile:
    inst: InstanceFile | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if inst is None:
            kind, k = _parse_header(line, lineno)
            inst = InstanceFile(kind, k=k)
            continue
        inst.records.append(_parse_record(line, lineno, inst.kind, inst.warnings))
    if inst is None:
        raise FormatError("missing header 'kind ...'")
    return inst


def _parse_record(line: str, lineno: int, kind: str, warnings: list[str]) -> Record:
    parts = line.split()
    if parts[0] != "item" or len(parts) < 2:
        raise FormatError("record must start with 'item <size>'", lineno)
    size = _rat(parts[1], lineno, warnings)
    if size > 1:
        raise FormatError("size exceeds 1", lineno)
    if size < 0:
        raise FormatError("negative size", lineno)
    fields: dict[str, str] = {}
    for tok in parts[2:]:
        key, sep, val = tok.partition("=")
        if not sep or key not in _FIELDS:
            raise FormatError(f"unknown field {tok!r}", lineno)
        if key in fields:
            raise FormatError(f"duplicate field {key!r}", lineno)
        fields[key] = val
    count = 1
    if "count" in fields:
        if not fields["count"].isdigit() or int(fields["count"]) < 1:
            raise FormatError("count must be a positive integer", lineno)
        count = int(fields["count"])
    if kind == "clustered" and "cluster" not in fields:
        raise FormatError("missing required field cluster", lineno)
    arrive = delay = None
    if kind == "timed":
        for req in ("arrive", "delay"):
            if req not in fields:
                raise FormatError(f"missing required field {req}", lineno)
        arrive = _rat(fields["arrive"], lineno, warnings)
        if arrive < 0:
            raise FormatError("arrival must be non-negative", lineno)
        delay = parse_delay(fields["delay"], lineno, warnings)
    elif "arrive" in fields or "delay" in fields:
        raise FormatError("arrive/delay are only allowed in timed instances", lineno)
    return Record(size, count, fields.get("cluster"), arrive, delay, fields.get("label", ""))


# ---------------------------------------------------------------- emitting

def emit_delay(d: DelayFunction) -> str:
    if d.kind == "linear":
        return f"linear:{fmt(d.rate)}"
    if d.kind == "power":
        return f"power:{fmt(d.rate)},{fmt(d.exponent)}"
    return "table:" + ",".join(f"{fmt(t)}:{fmt(v)}" for t, v in d.table)


def emit_instance(inst: InstanceFile) -> str:
    head = f"kind {inst.kind}" + (f" k={inst.k}" if inst.kind == "clustered" else "")
    lines = [head]
    for r in inst.records:
        parts = ["item", fmt(r.size)]
        if r.count != 1:
            parts.append(f"count={r.count}")
        if r.cluster is not None:
            parts.append(f"cluster={r.cluster}")
        if r.arrive is not None:
            parts.append(f"arrive={fmt(r.arrive)}")
        if r.delay is not None:
            parts.append(f"delay={emit_delay(r.delay)}")
        if r.label:
            parts.append(f"label={r.label}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def instance_from_clustered(inst: ClusteredInstance) -> InstanceFile:
    recs = [Record(c.size, c.count, cid, label=c.label)
            for cid, classes in inst.clusters.items() for c in classes]
    return InstanceFile("clustered", recs, k=inst.k)


def instance_from_timed(items) -> InstanceFile:
    recs = [Record(ti.size, 1, None, ti.arrival, ti.delay) for ti in sorted(items, key=lambda t: t.index)]
    return InstanceFile("timed", recs)


# ---------------------------------------------------------------- certificates

def emit_certificate(cert: Certificate, sizes: dict[str, Fraction]) -> str:
    lines = [f"certificate bins={cert.bin_count}"]
    lines += [f"size {label} {fmt(s)}" for label, s in sorted(sizes.items())]
    for pattern, mult in cert.patterns:
        lines.append(f"pattern count={mult} " + " ".join(f"{lab}:{c}" for lab, c in pattern))
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> tuple[Certificate, dict[str, Fraction]]:
    declared = None
    sizes: dict[str, Fraction] = {}
    patterns = []
    warnings: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "certificate":
            if len(parts) != 2 or not parts[1].startswith("bins="):
                raise FormatError("header must be 'certificate bins=<B>'", lineno)
            declared = int(parts[1][5:])
        elif parts[0] == "size" and len(parts) == 3:
            sizes[parts[1]] = _rat(parts[2], lineno, warnings)
        elif parts[0] == "pattern" and len(parts) >= 3 and parts[1].startswith("count="):
            mult = int(parts[1][6:])
            entries = []
            for tok in parts[2:]:
                lab, sep, c = tok.rpartition(":")
                if not sep or not c.isdigit():
                    raise FormatError(f"bad pattern entry {tok!r}", lineno)
                entries.append((lab, int(c)))
            patterns.append((tuple(entries), mult))
        else:
            raise FormatError(f"unrecognised line {line!r}", lineno)
    if declared is None:
        raise FormatError("missing certificate header")
    cert = Certificate(patterns)
    if cert.bin_count != declared:
        raise FormatError(f"header declares {declared} bins but patterns sum to {cert.bin_count}")
    return cert, sizes


def check_certificate(inst: ClusteredInstance, cert: Certificate, sizes: dict[str, Fraction]) -> list[str]:
    """Problems found when checking the certificate against the instance (empty list = valid)."""
    problems = []
    have = Counter()
    for c in inst.all_classes():
        if sizes.get(c.label) != c.size:
            problems.append(f"label {c.label!r} has size {fmt(c.size)} in the instance")
        have[c.label] += c.count
    used = Counter()
    for pattern, mult in cert.patterns:
        load = sum((sizes[lab] * c for lab, c in pattern), Fraction(0))
        if load > 1:
            problems.append(f"pattern {pattern} overfull by {fmt(load - 1)}")
        for lab, c in pattern:
            used[lab] += c * mult
    if used != have:
        problems.append("pattern multiplicities do not cover the instance exactly")
    return problems
