"""Hecke eigenvalues as certified quotients of slash sums.

The eigenvalue of an eigenform F under an operator with cosets Gamma M_i is
read off numerically: evaluate the coset sum

    (F | T)(Z) = sum_i det(D_i)^{-k} F(M_i<Z>)

and the form itself at the same point, then take the interval quotient.  To
know z = x / y within eps it suffices to know x within eps_x and y within
eps_y, where

    eps_x < h eps |y| / 2,
    eps_y < min((1 - h) eps |y| / (2 |z|), |y| / 2)

for any split h in (0, 1); the magnitudes enter only through coarse bounds
obtained from a first rough evaluation.  The final certificate never relies
on the budgets: the reported box is the interval quotient itself, and a run
succeeds only when its radius meets the requested tolerance.

Two truncation policies.  In heuristic mode all expansions are cut at a
uniform trace (2p for T_p, 2p^2 for T_{p^2,1}) and the reported box
certifies the quotient of the truncated model; this is the policy under
which the reference eigenvalues reproduce.  In rigorous mode every
evaluation point gets its own truncation bound from its own decay rate
alpha, and each generator box is widened by the proven tail envelope, so
the box contains the exact quotient; the required trace bounds grow roughly
linearly in p and become impractical beyond small primes.

Raw ratios are normalized by m^(2k-3), with m the similitude (p for T_p,
p^2 for T_{p^2,1}).  A normalized box of real radius below 1/2 whose
imaginary part contains 0 snaps to the unique integer it contains.
"""

from __future__ import annotations

import math
import multiprocessing
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr, mpq
from sympy import isprime

from .boxes import BoxDivisionError, BoxField, ComplexBox
from .cache import SeriesStore
from .cosets import CosetRep, act_on_point, operator_cosets
from .evaluate import (
    EvalPoint,
    NumericSeries,
    generator_bound,
    tail_bound,
    truncation_bound,
)

__all__ = [
    "CertificationError",
    "EigenvalueResult",
    "assemble_tp2",
    "coarse_magnitude_bounds",
    "default_precision",
    "default_y11",
    "eigenvalue",
    "hecke_image_at",
    "quotient_budget",
    "snap_to_integer",
]

MONOMIAL_NAMES = ("E4", "E6", "chi10", "chi12")
MAX_ESCALATIONS = 6
MAX_MAGNITUDE_DEPTH = 400
RIGOROUS_TRACE_CAP = 150


class CertificationError(RuntimeError):
    """The requested tolerance could not be certified."""


def default_y11(p: int) -> Fraction:
    """Fitted default for the point parameter; grows like log p.

    The line is shifted up so it never sits below the trial-and-error values
    it was fitted to: a larger y11 only shrinks truncation tails, at the cost
    of a few precision bits that the default margin absorbs."""
    return Fraction(str(round(-0.059060 + 4.070440 * math.log(p), 2)))


def default_precision(p: int) -> int:
    """Fitted default working precision in bits, with escalation headroom."""
    return max(64, math.ceil(-36.964731 + 89.304876 * math.log(p)) + 32)


def _exact_mpq(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


# -- quotient budgeting ----------------------------------------------------


def quotient_budget(eps, h, y_lower, z_upper) -> Tuple[mpfr, mpfr]:
    """Largest (eps_x, eps_y) satisfying the quotient inequalities, with |y|
    replaced by its lower bound and |z| by its upper bound.

    Exact rational arithmetic throughout, rounded down only on output, so a
    caller staying below the returned values satisfies the true inequalities.
    """
    epsq = _exact_mpq(eps)
    hq = _exact_mpq(h)
    if epsq <= 0:
        raise ValueError("eps must be positive")
    if not 0 < hq < 1:
        raise ValueError("the split h must lie strictly between 0 and 1")
    y_lo = _exact_mpq(y_lower)
    z_up = _exact_mpq(z_upper)
    if y_lo <= 0:
        raise ValueError("need a positive lower bound on |y|")
    if z_up <= 0:
        raise ValueError("need a positive upper bound on |z|")
    ex = hq * epsq * y_lo / 2
    ey = min((1 - hq) * epsq * y_lo / (2 * z_up), y_lo / 2)
    dn = gmpy2.context(precision=128, round=gmpy2.RoundDown)
    return dn.add(ex, 0), dn.add(ey, 0)


def coarse_magnitude_bounds(
    evaluate: Callable[[int], ComplexBox], max_depth: int = MAX_MAGNITUDE_DEPTH
) -> Tuple[mpfr, mpfr]:
    """Certified (lower, upper) bounds on |x| from progressively finer looks.

    ``evaluate(j)`` must return a box containing x with radius at most
    10^-j.  Starting from tolerance 0.1 and dividing by 10 each round, the
    first tolerance whose approximation satisfies |mid| - 2 tol > 0 yields
    the bounds (|mid| - 2 tol, |mid| + 2 tol).  Exhausting max_depth means
    the value is indistinguishable from zero.
    """
    for j in range(1, max_depth + 1):
        box = evaluate(j)
        f = box.re.field
        tol = f._round_up(mpq(1, 10**j))
        mre, mim = box.mid()
        mag_lo = f._dn.sqrt(f._dn.add(f._dn.mul(mre, mre), f._dn.mul(mim, mim)))
        mag_hi = f._up.sqrt(f._up.add(f._up.mul(mre, mre), f._up.mul(mim, mim)))
        two_tol = f._up.mul(mpfr(2), tol)
        lower = f._dn.sub(mag_lo, two_tol)
        if lower > 0:
            return lower, f._up.add(mag_hi, two_tol)
    raise CertificationError(
        f"no nonzero magnitude after {max_depth} refinements; "
        "the value is likely zero (evaluation point on a zero of F?)"
    )


# -- eigenform evaluation machinery ------------------------------------------


class _Run:
    """Everything a worker needs to evaluate form values at chosen points."""

    __slots__ = (
        "field",
        "points",
        "tasks",
        "series",
        "gen_names",
        "cboxes",
        "monos",
    )

    def __init__(self, field, points, tasks, series, gen_names, cboxes, monos):
        self.field = field
        self.points = points
        self.tasks = tasks
        self.series = series
        self.gen_names = gen_names
        self.cboxes = cboxes
        self.monos = monos


@dataclass
class _Task:
    indices: List[int]
    trace_of: Dict[str, int]
    tails: Optional[Dict[str, mpfr]]


_ACTIVE: Optional[_Run] = None


def _combine_terms(run: _Run, gvals: Dict[str, List[ComplexBox]], row: int) -> ComplexBox:
    f = run.field
    acc = ComplexBox(f.zero(), f.zero())
    powers: Dict[Tuple[str, int], ComplexBox] = {}
    for cbox, mono in zip(run.cboxes, run.monos):
        term = cbox
        for name, e in zip(MONOMIAL_NAMES, mono):
            if not e:
                continue
            key = (name, e)
            pw = powers.get(key)
            if pw is None:
                pw = gvals[name][row].pow_int(e)
                powers[key] = pw
            term = term * pw
        acc = acc + term
    return acc


def _eval_task(task_index: int):
    run = _ACTIVE
    task = run.tasks[task_index]
    pts = [run.points[i] for i in task.indices]
    memo: dict = {}
    gvals: Dict[str, List[ComplexBox]] = {}
    for name in run.gen_names:
        ns = run.series[(name, task.trace_of[name])]
        vals = ns.evaluate_many(pts, memo)
        if task.tails is not None:
            width = task.tails[name]
            vals = [v.widen(width) for v in vals]
        gvals[name] = vals
    return task_index, [
        (i, _combine_terms(run, gvals, row).to_bytes())
        for row, i in enumerate(task.indices)
    ]


def _run_tasks(run: _Run, threads: int) -> Dict[int, ComplexBox]:
    global _ACTIVE
    _ACTIVE = run
    try:
        if threads <= 1 or len(run.tasks) <= 1:
            chunks = [_eval_task(t) for t in range(len(run.tasks))]
        else:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(threads) as pool:
                chunks = pool.map(_eval_task, range(len(run.tasks)), chunksize=1)
    finally:
        _ACTIVE = None
    out: Dict[int, ComplexBox] = {}
    for _, rows in chunks:
        for i, blob in rows:
            out[i] = ComplexBox.from_bytes(run.field, blob)
    return out


# -- public slash sum ---------------------------------------------------------


def hecke_image_at(
    point: EvalPoint,
    reps: Sequence[CosetRep],
    weight: int,
    value_at: Callable[[Sequence[tuple]], List[ComplexBox]],
) -> ComplexBox:
    """The coset sum: sum of det(D_i)^{-weight} F(M_i<Z>) over ``reps``.

    ``value_at`` receives the transformed points as (z1, z2, z3) box triples
    and returns the form values in the same order; summation follows the
    enumeration order of ``reps`` so results are reproducible.
    """
    if not reps:
        raise ValueError("need at least one coset representative")
    pts = [act_on_point(rep, *point.triple()) for rep in reps]
    vals = value_at(pts)
    f = point.field()
    acc = ComplexBox(f.zero(), f.zero())
    for rep, val in zip(reps, vals):
        det = rep.det_d()
        if det <= 0:
            raise ValueError("representative has nonpositive det D")
        acc = acc + val.scale(mpq(1, det**weight))
    return acc


# -- results -----------------------------------------------------------------


@dataclass
class EigenvalueResult:
    name: str
    prime: int
    operator: str
    mode: str
    raw_ratio: ComplexBox
    normalized: ComplexBox
    snapped: Optional[int]
    coset_count: int
    precision_bits: int
    trace_bounds: Dict[str, int]
    wall_ms: float
    escalations: int
    y11: Fraction
    threads: int = 1

    @property
    def trace_bound(self) -> int:
        return max(self.trace_bounds.values())

    def timing_line(self) -> str:
        return (
            f"{self.prime}, {self.operator}, {self.coset_count}, "
            f"{self.precision_bits}, {self.trace_bound}, {self.wall_ms:.0f}"
        )


def snap_to_integer(box: ComplexBox) -> Optional[int]:
    """The integer nearest the real midpoint, present only when the real
    radius is below 1/2 and the imaginary part contains 0.

    When the box contains an integer this is that integer (radius < 1/2
    makes it unique).  Snapping asserts nothing about integrality; runs at
    independent points agreeing on the snap is the intended evidence.
    """
    if not box.im.contains_zero():
        return None
    if not box.re.rad_up() < 0.5:
        return None
    mid = (mpq(box.re.lo) + mpq(box.re.hi)) / 2
    n = (2 * mid.numerator + mid.denominator) // (2 * mid.denominator)
    return int(n)


# -- eigenvalue driver ---------------------------------------------------------


def _coefficient_data(form, field: BoxField) -> Tuple[List[ComplexBox], List[tuple], tuple]:
    cboxes = form.coefficient_boxes(field)
    monos = [tuple(mono) for mono in form.monomials]
    names = tuple(
        name
        for pos, name in enumerate(MONOMIAL_NAMES)
        if any(mono[pos] for mono in monos)
    )
    return cboxes, monos, names


def _amplification_digits(cboxes: Sequence[ComplexBox]) -> int:
    total = 0.0
    for c in cboxes:
        total += float(c.abs_up())
    return max(1, math.ceil(math.log10(total + 1))) + 2


def _digits_for(target: mpfr) -> int:
    """Decimal digits needed to stay below ``target``; exponent-safe."""
    return max(1, math.ceil(-float(gmpy2.log10(target))))


def _certified_form_value(store: SeriesStore, form, y11: Fraction, digits: int) -> ComplexBox:
    """F(Z) at the purely imaginary point built from y11, certified within
    10^-digits with truncation tails accounted."""
    prec = max(96, 16 + 4 * digits)
    for _ in range(4):
        f = BoxField(prec)
        base = EvalPoint.from_rationals(f, (y11, y11 + 1, 1))
        cboxes, monos, names = _coefficient_data(form, f)
        amp = _amplification_digits(cboxes)
        alpha = base.alpha()
        gvals: Dict[str, List[ComplexBox]] = {}
        memo: dict = {}
        for name in names:
            bound = generator_bound(name)
            trunc = truncation_bound(bound, alpha, digits + amp)
            ns = NumericSeries(store.series(name, trunc), f)
            val = ns.evaluate_many([base.triple()], memo)[0]
            gvals[name] = [val.widen(tail_bound(bound, alpha, trunc))]
        run = _Run(f, [base.triple()], [], {}, names, cboxes, monos)
        box = _combine_terms(run, gvals, 0)
        if mpq(box.radius_up()) <= mpq(1, 10**digits):
            return box
        prec *= 2
    raise CertificationError(
        f"form value at y11={y11} did not reach 10^-{digits} within precision ceiling"
    )


def _frac(q: mpq) -> mpq:
    return q - (q.numerator // q.denominator)


def _exact_parts(rep: CosetRep, y1: mpq, y2: mpq, y3: mpq):
    """Exact real and imaginary parts of M<iY>: with C = 0 the image is
    B D^-1 + i A Y D^-1, both symmetric rational matrices."""
    det = rep.d[0][0] * rep.d[1][1] - rep.d[0][1] * rep.d[1][0]
    adj = ((rep.d[1][1], -rep.d[0][1]), (-rep.d[1][0], rep.d[0][0]))

    def times_dinv(m):
        return tuple(
            tuple(
                mpq(m[r][0] * adj[0][c] + m[r][1] * adj[1][c], det) for c in (0, 1)
            )
            for r in (0, 1)
        )

    ay = (
        (
            rep.a[0][0] * y1 + rep.a[0][1] * y3,
            rep.a[0][0] * y3 + rep.a[0][1] * y2,
        ),
        (
            rep.a[1][0] * y1 + rep.a[1][1] * y3,
            rep.a[1][0] * y3 + rep.a[1][1] * y2,
        ),
    )
    return times_dinv(rep.b), times_dinv(ay)


def _pairing(reps: Sequence[CosetRep], y1: mpq, y2: mpq, y3: mpq) -> Optional[List[Tuple[int, int]]]:
    """Conjugation pairs (i, j), i <= j: M_j<iY> = -conj(M_i<iY>) up to an
    integral symmetric shift, so F(M_j<iY>) = conj(F(M_i<iY>)) for real
    coefficients.  None when some point has no partner."""
    parts = [_exact_parts(rep, y1, y2, y3) for rep in reps]
    index: Dict[tuple, List[int]] = {}
    for i, (x, y) in enumerate(parts):
        key = (reps[i].det_d(), y, _frac(x[0][0]), _frac(x[0][1]), _frac(x[1][1]))
        index.setdefault(key, []).append(i)
    pairs: List[Tuple[int, int]] = []
    seen = set()
    for i, (x, y) in enumerate(parts):
        if i in seen:
            continue
        want = (
            reps[i].det_d(),
            y,
            _frac(-x[0][0]),
            _frac(-x[0][1]),
            _frac(-x[1][1]),
        )
        j = next((c for c in index.get(want, ()) if c not in seen or c == i), None)
        if j is None:
            return None
        seen.add(i)
        seen.add(j)
        pairs.append((i, j))
    return pairs


def _plan_groups(points: List[tuple]) -> List[List[int]]:
    groups: Dict[tuple, List[int]] = {}
    for i, pt in enumerate(points):
        groups.setdefault(pt[2].key(), []).append(i)
    return list(groups.values())


def eigenvalue(
    form,
    p: int,
    operator: str = "tp",
    digits: int = 5,
    *,
    mode: str = "heuristic",
    y11=None,
    precision_bits: Optional[int] = None,
    threads: int = 1,
    trace_bound: Optional[int] = None,
    symmetry: bool = False,
    store: Optional[SeriesStore] = None,
    cache_dir: Optional[str] = None,
) -> EigenvalueResult:
    """Certified eigenvalue of ``form`` under T_p, T_{p^2,1}, or T_{p^2}.

    ``form`` provides ``name``, ``weight``, ``monomials`` (exponent tuples
    against E4, E6, chi10, chi12), and ``coefficient_boxes(field)``.  The
    target is 10^-digits on the normalized value; working precision doubles
    until the quotient box meets it.  ``trace_bound`` overrides the uniform
    truncation in heuristic mode and raises the planning cap in rigorous
    mode.  ``operator`` is one of "tp", "tp2_1", "tp2".
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if mode not in ("heuristic", "rigorous"):
        raise ValueError("mode must be 'heuristic' or 'rigorous'")
    if digits < 1:
        raise ValueError("need at least one digit of tolerance")
    if threads < 1:
        raise ValueError("threads must be positive")
    if operator == "tp2":
        return _tp2_eigenvalue(
            form,
            p,
            digits,
            mode=mode,
            y11=y11,
            precision_bits=precision_bits,
            threads=threads,
            trace_bound=trace_bound,
            symmetry=symmetry,
            store=store,
            cache_dir=cache_dir,
        )
    if operator not in ("tp", "tp2_1"):
        raise ValueError(f"unknown operator {operator!r}")

    start = time.perf_counter()
    store = store or SeriesStore(cache_dir)
    y11q = Fraction(y11) if y11 is not None else default_y11(p)
    if y11q <= 0:
        raise ValueError("y11 must be positive")
    prec = precision_bits or default_precision(p)
    k = form.weight
    similitude = p if operator == "tp" else p * p
    norm = similitude ** (2 * k - 3)
    eps_norm = mpq(1, 10**digits)
    eps_raw = eps_norm / norm
    reps = operator_cosets(operator, p)
    weights = [mpq(1, rep.det_d() ** k) for rep in reps]
    uniform_trace = trace_bound or (2 * p if operator == "tp" else 2 * p * p)
    trace_cap = max(trace_bound or 0, RIGOROUS_TRACE_CAP)

    plan_state: dict = {}
    escalations = 0
    zero_rounds = 0
    for _round in range(MAX_ESCALATIONS + 1):
        f = BoxField(prec)
        base = EvalPoint.from_rationals(f, (y11q, y11q + 1, 1))
        points = [act_on_point(rep, *base.triple()) for rep in reps]
        cboxes, monos, names = _coefficient_data(form, f)
        amp = _amplification_digits(cboxes)
        groups = _plan_groups(points)

        pairs = None
        if symmetry:
            if any(c.im.lo != 0 or c.im.hi != 0 for c in cboxes):
                raise ValueError("conjugation symmetry needs real coefficients")
            yq = (
                _exact_mpq(y11q),
                _exact_mpq(y11q + 1),
                mpq(1),
            )
            pairs = _pairing(reps, *yq)
            if pairs is None:
                raise ValueError(
                    "coset points are not closed under conjugation at this point"
                )
            wanted = {i for i, _ in pairs}
            kept = []
            for g in groups:
                g2 = [i for i in g if i in wanted]
                if g2:
                    kept.append(g2)
            groups = kept

        # Truncation plan per z3-group; within a group the imaginary parts
        # and det D are constant, so one trace bound serves all members.
        tasks: List[_Task] = []
        trace_report: Dict[str, int] = {}
        if mode == "heuristic":
            for g in groups:
                tasks.append(_Task(g, {n: uniform_trace for n in names}, None))
            den_traces = {n: uniform_trace for n in names}
            den_tails = None
            trace_report["den"] = uniform_trace
            trace_report["points"] = uniform_trace
        else:
            if "y_lo" not in plan_state:
                plan_state["y_lo"] = coarse_magnitude_bounds(
                    lambda j: _certified_form_value(store, form, y11q, j)
                )[0]
                plan_state["z_up"] = mpfr(1)
            eps_x, eps_y = quotient_budget(
                eps_raw, Fraction(1, 2), plan_state["y_lo"], plan_state["z_up"]
            )
            extra = 6 * _round
            n_reps = len(reps)
            for g in groups:
                rep_point = EvalPoint(*points[g[0]])
                alpha = rep_point.alpha()
                det_k = 1 / weights[g[0]]
                share = mpq(eps_x) * det_k / (2 * n_reps)
                h_pt = _digits_for(mpfr(share)) + amp + 1 + extra
                trace_of = {}
                tails = {}
                for name in names:
                    bound = generator_bound(name)
                    trunc = truncation_bound(bound, alpha, h_pt)
                    if trunc > trace_cap:
                        raise CertificationError(
                            f"rigorous truncation needs trace {trunc} > cap "
                            f"{trace_cap} at p={p}; raise trace_bound or use "
                            "heuristic mode"
                        )
                    trace_of[name] = trunc
                    tails[name] = tail_bound(bound, alpha, trunc)
                tasks.append(_Task(g, trace_of, tails))
            h_den = _digits_for(eps_y) + amp + 1 + extra
            alpha0 = base.alpha()
            den_traces = {}
            den_tails = {}
            for name in names:
                bound = generator_bound(name)
                trunc = truncation_bound(bound, alpha0, h_den)
                if trunc > trace_cap:
                    raise CertificationError(
                        f"rigorous denominator needs trace {trunc} > cap {trace_cap}"
                    )
                den_traces[name] = trunc
                den_tails[name] = tail_bound(bound, alpha0, trunc)
            trace_report["den"] = max(den_traces.values())
            trace_report["points"] = max(max(t.trace_of.values()) for t in tasks)

        needed = {(n, t.trace_of[n]) for t in tasks for n in names}
        needed |= {(n, den_traces[n]) for n in names}
        series = {
            (name, trunc): NumericSeries(store.series(name, trunc), f)
            for name, trunc in needed
        }

        run = _Run(f, points, tasks, series, names, cboxes, monos)
        values = _run_tasks(run, threads)

        # Denominator in the parent, always serial.
        memo: dict = {}
        den_gvals = {}
        for name in names:
            ns = series[(name, den_traces[name])]
            val = ns.evaluate_many([base.triple()], memo)[0]
            if den_tails is not None:
                val = val.widen(den_tails[name])
            den_gvals[name] = [val]
        den = _combine_terms(run, den_gvals, 0)

        zero_box = ComplexBox(f.zero(), f.zero())
        if pairs is not None:
            num = zero_box
            den = ComplexBox(den.re, f.zero())
            for i, j in pairs:
                s = values[i].scale(weights[i])
                if j == i:
                    num = num + ComplexBox(s.re, f.zero())
                else:
                    num = num + ComplexBox(s.re + s.re, f.zero())
        else:
            num = zero_box
            for i in range(len(reps)):
                num = num + values[i].scale(weights[i])

        if mode == "rigorous":
            up = gmpy2.context(precision=64, round=gmpy2.RoundUp)
            meas = up.div(num.abs_up(), plan_state["y_lo"])
            if meas > plan_state["z_up"]:
                plan_state["z_up"] = meas

        if den.contains_zero():
            zero_rounds += 1
            if zero_rounds >= 3:
                raise CertificationError(
                    f"F(Z) box still contains 0 at {prec} bits; "
                    f"choose a different y11 (tried {y11q})"
                )
            prec *= 2
            escalations += 1
            continue

        try:
            raw = num / den
        except BoxDivisionError:
            prec *= 2
            escalations += 1
            continue
        normalized = raw.scale(mpq(norm))
        if mpq(normalized.radius_up()) < eps_norm:
            wall_ms = (time.perf_counter() - start) * 1000.0
            return EigenvalueResult(
                name=form.name,
                prime=p,
                operator=operator,
                mode=mode,
                raw_ratio=raw,
                normalized=normalized,
                snapped=snap_to_integer(normalized),
                coset_count=len(reps),
                precision_bits=prec,
                trace_bounds=trace_report,
                wall_ms=wall_ms,
                escalations=escalations,
                y11=y11q,
                threads=threads,
            )
        prec *= 2
        escalations += 1

    raise CertificationError(
        f"quotient radius above 10^-{digits} after {escalations} precision "
        f"escalations (reached {prec} bits)"
    )


# -- T_{p^2} assembly -----------------------------------------------------------


def assemble_tp2(lam_p: ComplexBox, lam_p21: ComplexBox, p: int, weight: int) -> ComplexBox:
    """Normalized lambda_{p^2} from normalized lambda_p and lambda_{p^2,1}.

    Under the m^(2k-3) normalization the three pieces of T_{p^2} satisfy

        lambda_p^2 = (p^2+1)(p+1) lambda_{p^2,0} + (p+1) lambda_{p^2,1}
                     + lambda_{p^2,2}

    with lambda_{p^2,0} = p^(2 weight - 6), and lambda_{p^2} is the plain
    sum of the three.  The multiplicity assignment is pinned by the weight-0
    degree identity (p^3+p^2+p+1)^2 = (p^2+1)(p+1) + (p+1)(p^4+p^3+p^2+p)
    + (p^6+p^5+p^4+p^3) and confirmed against a full brute-force coset
    enumeration on two independent eigenforms.
    """
    f = lam_p.re.field
    lam0 = ComplexBox(f.real(p ** (2 * weight - 6)), f.zero())
    lam22 = (
        lam_p.pow_int(2)
        - lam0.scale(mpq((p * p + 1) * (p + 1)))
        - lam_p21.scale(mpq(p + 1))
    )
    return lam0 + lam_p21 + lam22


def _tp2_eigenvalue(form, p, digits, **opts) -> EigenvalueResult:
    store = opts.pop("store", None) or SeriesStore(opts.get("cache_dir"))
    opts["store"] = store
    k = form.weight

    sub = eigenvalue(form, p, "tp", digits + 4, **opts)
    lam_p_mag = float(sub.normalized.abs_up())
    if mpq(sub.normalized.radius_up()) * 2 * mpq(mpfr(lam_p_mag + 1)) >= mpq(
        1, 4 * 10**digits
    ):
        need = max(digits + 5, digits + math.ceil(math.log10(8 * (lam_p_mag + 1))))
        sub = eigenvalue(form, p, "tp", need, **opts)
    sub21 = eigenvalue(form, p, "tp2_1", digits + 2, **opts)

    normalized = assemble_tp2(sub.normalized, sub21.normalized, p, k)
    if mpq(normalized.radius_up()) >= mpq(1, 10**digits):
        raise CertificationError(
            f"assembled T_p^2 box misses 10^-{digits} despite certified parts"
        )
    raw = normalized.scale(mpq(1, (p * p) ** (2 * k - 3)))
    return EigenvalueResult(
        name=form.name,
        prime=p,
        operator="tp2",
        mode=sub.mode,
        raw_ratio=raw,
        normalized=normalized,
        snapped=snap_to_integer(normalized),
        coset_count=sub.coset_count + sub21.coset_count,
        precision_bits=max(sub.precision_bits, sub21.precision_bits),
        trace_bounds={"tp": sub.trace_bound, "tp2_1": sub21.trace_bound},
        wall_ms=sub.wall_ms + sub21.wall_ms,
        escalations=sub.escalations + sub21.escalations,
        y11=sub.y11,
        threads=sub.threads,
    )
