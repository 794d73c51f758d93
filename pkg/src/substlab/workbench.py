"""Instance files, experiment reports and the batch drivers behind the CLI."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from .cnf import min_cnf_growth
from .errors import BudgetExceeded, SubstLabError
from .exact import IntMatrix, integer_inverse, minor_bound_check
from .oracle import StepCounter, build_table, throughput_report, verify_bijection
from .subst import (
    SubstInstance,
    SubstSystem,
    back_substitute,
    derive_boxes,
    forward_eliminate,
    generate_note1,
    instance_for,
    intermediate_size_check,
    verify_cardinality_link,
)

FORMAT = "substlab-instance/1"
REPORT_FORMAT = "substlab-report/1"


# -- instance files -----------------------------------------------------------

@dataclass
class InstanceFile:
    instance: SubstInstance | None = None
    system: SubstSystem | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def render(self) -> str:
        doc: dict[str, Any] = {"format": FORMAT}
        if self.instance is not None:
            inst = self.instance
            doc["instance"] = {
                "a": [str(v) for v in inst.a],
                "c": str(inst.c),
                "boxes": [[str(lo), str(hi)] for lo, hi in inst.boxes],
            }
        if self.system is not None:
            s = self.system
            doc["system"] = {
                "B": [[str(v) for v in r] for r in s.B.rows],
                "offset": [str(v) for v in s.offset],
                "c": str(s.c),
            }
        doc["meta"] = {k: (str(v) if isinstance(v, int) and not isinstance(v, bool) else v)
                       for k, v in self.meta.items()}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def parse(cls, text: str) -> "InstanceFile":
        doc = json.loads(text)
        if doc.get("format") != FORMAT:
            raise ValueError(f"unsupported format {doc.get('format')!r}, expected {FORMAT!r}")
        inst = sys_ = None
        if "instance" in doc:
            d = doc["instance"]
            inst = SubstInstance(
                tuple(_int(v) for v in d["a"]),
                _int(d["c"]),
                tuple((_int(lo), _int(hi)) for lo, hi in d["boxes"]),
            )
        if "system" in doc:
            d = doc["system"]
            sys_ = SubstSystem(
                IntMatrix.of([[_int(v) for v in r] for r in d["B"]]),
                _int(d["c"]),
                tuple(_int(v) for v in d.get("offset", [])),
            )
        if inst is None and sys_ is None:
            raise ValueError("file holds neither an instance nor a system")
        meta = dict(doc.get("meta", {}))
        for k in ("seed", "bound", "n", "tightened_k"):
            if isinstance(meta.get(k), str):
                meta[k] = _int(meta[k])
        return cls(inst, sys_, meta)

    @classmethod
    def load(cls, path: str | Path) -> "InstanceFile":
        path = Path(path)
        try:
            return cls.parse(path.read_text())
        except OSError as e:
            raise OSError(f"{path}: {e.strerror or e}") from e

    def save(self, path: str | Path):
        Path(path).write_text(self.render())

    def require_system(self) -> SubstSystem:
        if self.system is None:
            raise ValueError("file has no substitution system")
        return self.system

    def require_instance(self) -> SubstInstance:
        if self.instance is not None:
            return self.instance
        return instance_for(self.require_system())


def _int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ValueError(f"expected a decimal integer, got {v!r}")
    return int(v)


def digest(*parts: Any) -> str:
    blob = json.dumps(parts, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# -- reports ------------------------------------------------------------------

@dataclass
class ExperimentReport:
    title: str
    seed: int | None = None
    sections: dict[str, list[dict[str, Any]]] = field(default_factory=dict)
    failures: list[dict[str, Any]] = field(default_factory=list)

    def add(self, section: str, key: str, value: Any, op: str, input_digest: str):
        self.sections.setdefault(section, []).append(
            {"key": key, "value": value, "op": op, "input": input_digest}
        )

    def fail(self, **info):
        self.failures.append(info)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        doc = {
            "format": REPORT_FORMAT,
            "version": __version__,
            "title": self.title,
            "seed": self.seed,
            "passed": self.passed,
            "sections": self.sections,
            "failures": self.failures,
        }
        return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"

    def to_text(self) -> str:
        lines = [f"# {self.title}" + (f" (seed {self.seed})" if self.seed is not None else "")]
        for name, entries in self.sections.items():
            lines.append(f"[{name}]")
            for e in entries:
                lines.append(f"  {e['key']}: {e['value']}  <- {e['op']} @{e['input']}")
        lines.append(f"failures: {len(self.failures)}")
        for f in self.failures:
            lines.append("  " + ", ".join(f"{k}={v}" for k, v in f.items()))
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


# -- worked example ---------------------------------------------------------------

WORKED_B = IntMatrix.of([[1, 1, -2], [3, 4, -3], [2, -3, -20]])
WORKED_INSTANCE = SubstInstance((52, -15, -3), 2, ((-2, 2), (-3, 7), (-23, 2)))
WORKED_SYSTEM = SubstSystem(WORKED_B, 2)
# x_i = y-part + x-part, one row per elimination step
WORKED_STEPS = (
    ((1, 0, 0), (0, -1, 2)),
    ((-3, 1, 0), (0, 0, -3)),
    ((17, -5, -1), (0, 0, 0)),
)
WORKED_INVERSE = ((89, -26, -5), (-54, 16, 3), (17, -5, -1))


@dataclass
class SelftestResult:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def check(self, name: str, got, want):
        ok = got == want
        self.checks.append((name, ok, "" if ok else f"got {got!r}, want {want!r}"))
        return ok

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def render(self) -> str:
        lines = [f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({diff})" if diff else "")
                 for name, ok, diff in self.checks]
        lines.append(f"{sum(ok for _, ok, _ in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def selftest_worked_example() -> SelftestResult:
    """Run the worked 3-variable example end to end against its printed values."""
    res = SelftestResult()
    try:
        trace = forward_eliminate(WORKED_SYSTEM)
    except SubstLabError as e:
        res.checks.append(("forward elimination", False, repr(e)))
        return res
    got = tuple((st.y_coeffs, st.x_coeffs) for st in trace.steps)
    for i, (g, w) in enumerate(zip(got, WORKED_STEPS), start=1):
        res.check(f"elimination step x{i}", g, w)
    res.check("unit pivots", all(abs(p) == 1 for p in trace.pivots), True)
    inv = back_substitute(trace)
    res.check("back substitution", inv.rows, WORKED_INVERSE)
    res.check("adjugate inverse", integer_inverse(WORKED_B).rows, WORKED_INVERSE)
    res.check("B * inverse", (WORKED_B @ inv).rows, IntMatrix.identity(3).rows)
    res.check("derived boxes", derive_boxes(WORKED_SYSTEM), WORKED_INSTANCE.boxes)
    link = verify_cardinality_link(WORKED_INSTANCE, WORKED_SYSTEM)
    res.check("cardinality link a^T B", link.aB, (1, 1, 1))
    res.check("cardinality link flag", link.linked, True)
    rep = verify_bijection(WORKED_INSTANCE, WORKED_SYSTEM)
    res.check("images inside boxes", rep.out_of_box_x, [])
    res.check("box solutions outside the image", rep.extra_y, [])
    return res


# -- growth -------------------------------------------------------------------

def growth_csv(n_max: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "c", "implicate_count", "verified_minimal"])
    for r in min_cnf_growth(n_max):
        w.writerow([r.n, r.c, r.implicate_count, str(r.verified_minimal).lower()])
    return buf.getvalue()


def run_growth(n_max: int, out: str | Path | None = None) -> tuple[ExperimentReport, str]:
    text = growth_csv(n_max)
    if out is not None:
        try:
            Path(out).write_text(text)
        except OSError as e:
            raise OSError(f"{out}: {e.strerror or e}") from e
    rep = ExperimentReport("growth")
    d = digest("growth", n_max)
    for r in min_cnf_growth(n_max):
        rep.add("growth", f"n={r.n},c={r.c}", r.implicate_count, "prime_implicates_cardinality", d)
        if r.verified_minimal:
            rep.add("minimality", f"n={r.n}", True, "minimal_by_cover_search", d)
    return rep, text


# -- property suite -------------------------------------------------------------

SUITE_MAX_N = 8
SUITE_MAX_BOUND = 10


def suite_params(count: int, seed: int) -> list[tuple[int, int, int]]:
    """(n, coeff_bound, system seed) for each suite member, derived from one seed."""
    rng = random.Random(seed)
    return [(rng.randint(1, SUITE_MAX_N), rng.randint(1, SUITE_MAX_BOUND), rng.getrandbits(32))
            for _ in range(count)]


def check_system(s: SubstSystem, rep: ExperimentReport, tag: str, counter: StepCounter,
                 budget: int | None = None, **repro) -> bool:
    """Round trip, size bounds, bijection and accounting for one system."""
    d = digest(s.B.rows, s.offset, s.c)
    ok = True

    def fail(check, detail):
        nonlocal ok
        ok = False
        rep.fail(system=tag, check=check, detail=detail, **repro)

    try:
        trace = forward_eliminate(s)
    except SubstLabError as e:
        fail("elimination", repr(e))
        return False
    inv = back_substitute(trace)
    n = s.n
    if (s.B @ inv).rows != IntMatrix.identity(n).rows or inv != integer_inverse(s.B):
        fail("round trip", "B * back_substitute(trace) != I")
    isz = intermediate_size_check(trace, s.B)
    rep.add(tag, "max_intermediate_size", isz.max_size, "intermediate_size_check", d)
    if not isz.holds:
        fail("intermediate size", f"{isz.max_size} > {isz.bound}")
    mb = minor_bound_check(s.B)
    rep.add(tag, "max_minor", mb.max_minor, "minor_bound_check", d)
    if not mb.holds:
        fail("minor bound", f"{mb.max_minor} > {mb.bound}")
    local = StepCounter()
    try:
        br = verify_bijection(instance_for(s), s, budget, local)
        rep.add(tag, "bijection", br.holds, "verify_bijection", d)
        if not br.holds:
            fail("bijection", f"{len(br.extra_y)} extra y, {len(br.out_of_box_x)} x out of box")
    except BudgetExceeded as e:
        fail("bijection", f"budget exceeded: {e.size} > {e.budget}")
    if local.steps:
        th = throughput_report(local.infs, local.steps)
        rep.add(tag, "TH", str(th.throughput), "throughput_report", d)
        if not th.throughput <= 1:
            fail("throughput", str(th.throughput))
    counter.merge(local)
    return ok


def run_property_suite(count: int, seed: int, budget: int | None = None,
                       corrupt: int | None = None) -> ExperimentReport:
    """Generate ``count`` systems and run every check on each.

    ``corrupt`` names a member whose matrix gets a duplicated row (det 0), as
    a negative control.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rep = ExperimentReport("property suite", seed)
    total = StepCounter()
    passed = 0
    for i, (n, bound, sseed) in enumerate(suite_params(count, seed)):
        s = generate_note1(n, sseed, bound)
        if i == corrupt:
            rows = list(s.B.rows)
            rows[-1] = rows[0]
            if n == 1:
                rows = [(0,)]
            s = SubstSystem(IntMatrix.of(rows), s.c, s.offset)
        tag = f"system[{i}]"
        passed += check_system(s, rep, tag, total, budget, n=n, bound=bound, seed=sseed)
    d = digest("suite", count, seed)
    rep.add("summary", "systems", count, "run_property_suite", d)
    rep.add("summary", "passed", passed, "run_property_suite", d)
    if total.steps:
        th = throughput_report(total.infs, total.steps)
        rep.add("summary", "I", th.infs, "throughput_report", d)
        rep.add("summary", "N", th.steps, "throughput_report", d)
        rep.add("summary", "TH", str(th.throughput), "throughput_report", d)
    return rep


def table_text(s: SubstSystem, order: str) -> str:
    t = build_table(s, order)
    n = s.n
    head = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
    lines = ["\t".join(head)]
    for r in t.rows:
        lines.append("\t".join(str(v) for v in r.x + r.y))
    return "\n".join(lines)
