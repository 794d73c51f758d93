"""CNF side: encoders for weighted 0/1 equations, a DPLL decision procedure,
prime implicates of symmetric functions and the entailment transposition check.

Literals are nonzero ints in DIMACS convention (variable ``v`` is ``v`` or
``-v``, 1-based).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from .errors import BudgetExceeded, PremiseIncompatible

Clause = tuple[int, ...]


@dataclass(frozen=True)
class CnfFormula:
    var_names: tuple[str, ...]
    clauses: tuple[Clause, ...]
    aux_start: int | None = None  # 0-based index of the first auxiliary; None = no auxiliaries

    def __post_init__(self):
        names = tuple(self.var_names)
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        nv = len(names)
        if len(set(names)) != nv:
            raise ValueError("duplicate variable names")
        for c in clauses:
            if len(set(c)) != len(c):
                raise ValueError(f"duplicate literal in clause {c}")
            for l in c:
                if l == 0 or abs(l) > nv:
                    raise ValueError(f"literal {l} out of range 1..{nv}")
                if -l in c:
                    raise ValueError(f"clause {c} contains a variable and its negation")
        aux = nv if self.aux_start is None else self.aux_start
        if not 0 <= aux <= nv:
            raise ValueError(f"aux_start {aux} out of range")
        object.__setattr__(self, "var_names", names)
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "aux_start", aux)

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    @property
    def num_primary(self) -> int:
        return self.aux_start

    def index(self, name: str) -> int:
        return self.var_names.index(name) + 1

    def without_clause(self, i: int) -> "CnfFormula":
        return CnfFormula(self.var_names, self.clauses[:i] + self.clauses[i + 1:], self.aux_start)

    def with_units(self, lits: Iterable[int]) -> "CnfFormula":
        return CnfFormula(self.var_names, self.clauses + tuple((l,) for l in lits), self.aux_start)

    def evaluate(self, values: Sequence[int]) -> bool:
        """Truth value under a full 0/1 assignment (values[v-1] for variable v)."""
        return all(any((values[abs(l) - 1] == 1) == (l > 0) for l in c) for c in self.clauses)


def primary_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


class _Builder:
    def __init__(self, primaries: Sequence[str]):
        self.names = list(primaries)
        self.n_primary = len(self.names)
        self.clauses: list[Clause] = []

    def fresh(self, prefix: str) -> int:
        self.names.append(f"{prefix}{len(self.names) - self.n_primary + 1}")
        return len(self.names)

    def add(self, *lits: int):
        self.clauses.append(tuple(lits))

    def build(self) -> CnfFormula:
        return CnfFormula(tuple(self.names), tuple(self.clauses), self.n_primary)


# -- encoders -----------------------------------------------------------------

@dataclass(frozen=True)
class CardinalitySpec:
    """``sum(w_i x_i) == c``; without weights this is exactly-c-of-n."""

    n: int
    c: int
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.weights is not None:
            w = tuple(int(x) for x in self.weights)
            if len(w) != self.n:
                raise ValueError(f"{len(w)} weights for n = {self.n}")
            if any(x < 0 for x in w):
                raise ValueError("weights must be nonnegative")
            object.__setattr__(self, "weights", w)
            if self.c < 0:
                raise ValueError("target must be nonnegative")
        elif not 0 <= self.c <= self.n:
            raise ValueError(f"need 0 <= c <= n, got c = {self.c}, n = {self.n}")

    @property
    def unit(self) -> bool:
        return self.weights is None or all(w == 1 for w in self.weights)

    def holds(self, x: Sequence[int]) -> bool:
        w = self.weights or (1,) * self.n
        return sum(a * b for a, b in zip(w, x)) == self.c


def _at_most(b: _Builder, lits: Sequence[int], k: int):
    """Sequential counter: at most k of lits are true."""
    n = len(lits)
    if k >= n:
        return
    if k == 0:
        for l in lits:
            b.add(-l)
        return
    # s[i][j]: at least j+1 of lits[0..i] are true
    s = [[b.fresh("s") for _ in range(k)] for _ in range(n - 1)]
    b.add(-lits[0], s[0][0])
    for j in range(1, k):
        b.add(-s[0][j])
    for i in range(1, n - 1):
        b.add(-lits[i], s[i][0])
        b.add(-s[i - 1][0], s[i][0])
        for j in range(1, k):
            b.add(-lits[i], -s[i - 1][j - 1], s[i][j])
            b.add(-s[i - 1][j], s[i][j])
        b.add(-lits[i], -s[i - 1][k - 1])
    b.add(-lits[n - 1], -s[n - 2][k - 1])


def _half_adder(b: _Builder, x: int, y: int) -> tuple[int, int]:
    s, co = b.fresh("h"), b.fresh("h")
    b.add(-s, x, y)
    b.add(-s, -x, -y)
    b.add(s, -x, y)
    b.add(s, x, -y)
    b.add(-co, x)
    b.add(-co, y)
    b.add(co, -x, -y)
    return s, co


def _full_adder(b: _Builder, x: int, y: int, z: int) -> tuple[int, int]:
    s, co = b.fresh("f"), b.fresh("f")
    for signs in itertools.product((1, -1), repeat=3):
        # an odd number of true inputs forces s; even forbids it
        odd = sum(1 for t in signs if t > 0) % 2 == 1
        b.add(s if odd else -s, -signs[0] * x, -signs[1] * y, -signs[2] * z)
    for p, q in ((x, y), (x, z), (y, z)):
        b.add(co, -p, -q)
        b.add(-co, p, q)
    return s, co


def _adder_network(b: _Builder, weights: Sequence[int], c: int):
    width = max(sum(weights), c, 1).bit_length() + 1
    cols: list[list[int]] = [[] for _ in range(width)]
    for v, w in enumerate(weights, start=1):
        for bit in range(w.bit_length()):
            if w >> bit & 1:
                cols[bit].append(v)
    for bit in range(width):
        col = cols[bit]
        while len(col) > 1:
            if len(col) >= 3:
                s, co = _full_adder(b, col.pop(), col.pop(), col.pop())
            else:
                s, co = _half_adder(b, col.pop(), col.pop())
            col.append(s)
            if bit + 1 < width:
                cols[bit + 1].append(co)
            else:
                b.add(-co)
        want = c >> bit & 1
        if col:
            b.add(col[0] if want else -col[0])
        elif want:
            b.add()  # target bit set but nothing can produce it
    if c >> width:
        b.add()


def encode_cpp(spec: CardinalitySpec) -> CnfFormula:
    """CNF whose models projected to x are exactly the 0/1 solutions of the spec."""
    b = _Builder(primary_names(spec.n))
    if spec.unit:
        lits = list(range(1, spec.n + 1))
        if spec.c > spec.n:
            b.add()
        else:
            _at_most(b, lits, spec.c)
            _at_most(b, [-l for l in lits], spec.n - spec.c)
    else:
        _adder_network(b, spec.weights, spec.c)
    return b.build()


# -- DPLL -----------------------------------------------------------------------

@dataclass(frozen=True)
class SatResult:
    sat: bool
    model: dict[int, int] = field(default_factory=dict)

    def __bool__(self):
        return self.sat


def dpll(f: CnfFormula | Sequence[Clause], num_vars: int | None = None) -> SatResult:
    """Complete DPLL with two watched literals and chronological backtracking."""
    if isinstance(f, CnfFormula):
        clauses, nv = f.clauses, f.num_vars
    else:
        clauses = [tuple(c) for c in f]
        nv = num_vars if num_vars is not None else max((abs(l) for c in clauses for l in c), default=0)

    value = [0] * (nv + 1)  # 0 unassigned, 1 true, -1 false
    watches: dict[int, list[list[int]]] = {l: [] for v in range(1, nv + 1) for l in (v, -v)}
    units = []
    cls = []
    for c in clauses:
        if not c:
            return SatResult(False)
        if len(c) == 1:
            units.append(c[0])
            continue
        c = list(c)
        cls.append(c)
        watches[c[0]].append(c)
        watches[c[1]].append(c)

    trail: list[int] = []
    # (trail length at decision, decided literal, already flipped)
    decisions: list[tuple[int, int, bool]] = []

    def lit_val(l):
        v = value[abs(l)]
        return v if l > 0 else -v

    def assign(l):
        value[abs(l)] = 1 if l > 0 else -1
        trail.append(l)

    def propagate(start):
        i = start
        while i < len(trail):
            false_lit = -trail[i]
            i += 1
            ws = watches[false_lit]
            j = 0
            while j < len(ws):
                c = ws[j]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                other = c[0]
                if lit_val(other) == 1:
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if lit_val(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches[c[1]].append(c)
                        ws[j] = ws[-1]
                        ws.pop()
                        break
                else:
                    if lit_val(other) == -1:
                        return False
                    if lit_val(other) == 0:
                        assign(other)
                    j += 1
        return True

    for l in units:
        if lit_val(l) == -1:
            return SatResult(False)
        if lit_val(l) == 0:
            assign(l)
    ok = propagate(0)
    next_var = 1
    while True:
        if not ok:
            # backtrack to the most recent unflipped decision
            while decisions and decisions[-1][2]:
                decisions.pop()
            if not decisions:
                return SatResult(False)
            mark, lit, _ = decisions.pop()
            for l in trail[mark:]:
                value[abs(l)] = 0
            del trail[mark:]
            next_var = 1
            decisions.append((mark, -lit, True))
            assign(-lit)
            ok = propagate(mark)
            continue
        while next_var <= nv and value[next_var] != 0:
            next_var += 1
        if next_var > nv:
            return SatResult(True, {v: int(value[v] == 1) for v in range(1, nv + 1)})
        mark = len(trail)
        decisions.append((mark, -next_var, False))
        assign(-next_var)
        ok = propagate(mark)


def brute_force_sat(f: CnfFormula) -> bool:
    """Truth-table satisfiability, for cross-checking :func:`dpll`."""
    return any(f.evaluate(vals) for vals in itertools.product((0, 1), repeat=f.num_vars))


# -- encoder validation -------------------------------------------------------------

def equiv_check(f: CnfFormula, spec: CardinalitySpec, max_n: int = 20) -> bool:
    """For every x, f with x fixed is satisfiable iff the spec holds at x."""
    if spec.n > max_n:
        raise BudgetExceeded(2**spec.n, 2**max_n)
    for x in itertools.product((0, 1), repeat=spec.n):
        units = [v if b else -v for v, b in enumerate(x, start=1)]
        if bool(dpll(f.with_units(units))) != spec.holds(x):
            return False
    return True


def projected_models(f: CnfFormula) -> set[tuple[int, ...]]:
    k = f.num_primary
    out = set()
    for x in itertools.product((0, 1), repeat=k):
        if dpll(f.with_units([v if b else -v for v, b in enumerate(x, start=1)])):
            out.add(x)
    return out


# -- prime implicates ---------------------------------------------------------------

def prime_implicates_symmetric(n: int, accepted: Iterable[int]) -> CnfFormula:
    """All prime implicates of the symmetric function true exactly on the given weights.

    A clause with p positive and q negative literals is falsified exactly by
    assignments whose weight lies in [q, n - p], so whether it is an implicate
    depends only on (p, q).
    """
    acc = set(accepted)

    def implicate(p, q):
        return not any(w in acc for w in range(q, n - p + 1))

    clauses = []
    for width in range(0, n + 1):
        for p in range(width + 1):
            q = width - p
            if not implicate(p, q):
                continue
            if (p and implicate(p - 1, q)) or (q and implicate(p, q - 1)):
                continue
            for vs in itertools.combinations(range(1, n + 1), width):
                for pos in itertools.combinations(vs, p):
                    ps = set(pos)
                    clauses.append(tuple(v if v in ps else -v for v in vs))
    return CnfFormula(primary_names(n), tuple(clauses))


PRIME_BUDGET_N = 16


def prime_implicates_cardinality(n: int, c: int) -> CnfFormula:
    if n > PRIME_BUDGET_N:
        raise BudgetExceeded(n, PRIME_BUDGET_N)
    if not 0 <= c <= n:
        raise ValueError(f"need 0 <= c <= n, got c = {c}, n = {n}")
    return prime_implicates_symmetric(n, [c])


def implicate_count_formula(n: int, c: int) -> int:
    """C(n, c+1) all-negative plus C(n, n-c+1) all-positive clauses."""
    return comb(n, c + 1) + comb(n, n - c + 1)


def clause_cube(clause: Clause, n: int) -> int:
    """Bitmask (over the 2^n assignments) of assignments falsifying the clause."""
    mask = 0
    for a in range(1 << n):
        if all(((a >> (abs(l) - 1)) & 1) != (l > 0) for l in clause):
            mask |= 1 << a
    return mask


def minimal_by_cover_search(clauses: Sequence[Clause], n: int, function_mask: int) -> bool:
    """True iff no strict subset of clauses is equivalent to the function.

    Exhaustive over every strict subset; only sensible for small clause sets.
    """
    full = (1 << (1 << n)) - 1
    need = full & ~function_mask
    cubes = [clause_cube(c, n) for c in clauses]
    m = len(cubes)
    covered = 0
    for cb in cubes:
        covered |= cb
    if covered != need:
        return False
    for subset in range((1 << m) - 1):
        acc = 0
        bits = subset
        while bits:
            low = bits & -bits
            acc |= cubes[low.bit_length() - 1]
            bits ^= low
        if acc == need:
            return False
    return True


def cardinality_mask(n: int, c: int) -> int:
    return sum(1 << a for a in range(1 << n) if bin(a).count("1") == c)


@dataclass(frozen=True)
class GrowthRow:
    n: int
    c: int
    implicate_count: int
    verified_minimal: bool


MINIMALITY_SEARCH_MAX_N = 5


def min_cnf_growth(n_max: int) -> list[GrowthRow]:
    if n_max > PRIME_BUDGET_N:
        raise BudgetExceeded(n_max, PRIME_BUDGET_N)
    rows = []
    for n in range(2, n_max + 1):
        c = n // 2
        f = prime_implicates_cardinality(n, c)
        minimal = False
        if n <= MINIMALITY_SEARCH_MAX_N:
            minimal = minimal_by_cover_search(f.clauses, n, cardinality_mask(n, c))
        rows.append(GrowthRow(n, c, len(f.clauses), minimal))
    return rows


# -- transposition check ------------------------------------------------------

def _merge(*formulas: CnfFormula) -> tuple[list[str], list[list[Clause]]]:
    names: list[str] = []
    for f in formulas:
        for nm in f.var_names:
            if nm not in names:
                names.append(nm)
    pos = {nm: i + 1 for i, nm in enumerate(names)}
    remapped = []
    for f in formulas:
        remapped.append([
            tuple((1 if l > 0 else -1) * pos[f.var_names[abs(l) - 1]] for l in c) for c in f.clauses
        ])
    return names, remapped


def _negation(clauses: Sequence[Clause], next_var: int) -> tuple[list[Clause], int]:
    """Clauses for NOT(AND clauses), one selector variable per clause."""
    sel = list(range(next_var, next_var + len(clauses)))
    out = [tuple(sel)]
    for s, c in zip(sel, clauses):
        for l in c:
            out.append((-s, -l))
    return out, next_var + len(clauses)


def entails(premises: Sequence[Clause], conclusion: Sequence[Clause], nv: int) -> bool:
    neg, top = _negation(conclusion, nv + 1)
    return not dpll(list(premises) + neg, top - 1)


@dataclass(frozen=True)
class TranspositionVerdict:
    premise_holds: bool
    conclusion_holds: bool


def transposition_check(phi: CnfFormula, F: CnfFormula, H: CnfFormula) -> TranspositionVerdict:
    """Decide (phi & F |= H) and (phi & ~H |= ~F) independently by refutation."""
    names, (p, f, h) = _merge(phi, F, H)
    nv = len(names)
    if not dpll(p + f, nv):
        raise PremiseIncompatible("phi & F is unsatisfiable")
    premise = entails(p + f, h, nv)
    neg_h, top = _negation(h, nv + 1)
    # phi & ~H |= ~F  iff  phi & ~H & F is unsatisfiable
    conclusion = not dpll(p + neg_h + f, top - 1)
    return TranspositionVerdict(premise, conclusion)


def random_cnf(rng: random.Random, num_vars: int, num_clauses: int, width: int = 3,
               names: Sequence[str] | None = None) -> CnfFormula:
    names = tuple(names) if names is not None else tuple(f"v{i + 1}" for i in range(num_vars))
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), min(width, num_vars))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(names, tuple(clauses))


# -- DIMACS -------------------------------------------------------------------------

def to_dimacs(f: CnfFormula) -> str:
    lines = [
        f"c primary {f.num_primary}",
        f"c auxiliary {f.num_vars - f.num_primary}",
    ]
    lines += [f"c var {i} {nm}" for i, nm in enumerate(f.var_names, start=1)]
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    lines += [" ".join(str(l) for l in c + (0,)) for c in f.clauses]
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> CnfFormula:
    header = None
    primary = None
    names: dict[int, str] = {}
    lits: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 3 and parts[1] == "primary":
                primary = int(parts[2])
            elif len(parts) == 4 and parts[1] == "var":
                names[int(parts[2])] = parts[3]
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise ValueError("clause before 'p cnf' header")
        lits.extend(int(t) for t in line.split())
    if header is None:
        raise ValueError("missing 'p cnf' header")
    nv, nc = header
    clauses, cur = [], []
    for l in lits:
        if l == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(l)
    if cur:
        raise ValueError("last clause not terminated by 0")
    if len(clauses) != nc:
        raise ValueError(f"header announces {nc} clauses, found {len(clauses)}")
    var_names = tuple(names.get(i, f"v{i}") for i in range(1, nv + 1))
    return CnfFormula(var_names, tuple(clauses), nv if primary is None else primary)
