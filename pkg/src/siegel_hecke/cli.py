"""Command-line surface.

Subcommands: eigenvalue, expand-generators, list-cosets, verify, bench,
serve.  Exit codes: 0 on success, 1 when a certification or runtime failure
occurs, 2 on usage errors.  All heavy lifting stays in the library; the
commands parse flags, pick a cache directory (flag, else SIEGEL_CACHE_DIR,
else a user cache path), and render results.
"""

from __future__ import annotations

import random
import sys
from decimal import ROUND_CEILING, ROUND_FLOOR, Context as DecimalContext
from fractions import Fraction

import click
import gmpy2
from gmpy2 import mpfr, mpq

from .boxes import BoxField, ComplexBox
from .cache import SeriesStore
from .catalog import (
    CatalogError,
    builtin_catalog,
    catalog_form,
    load_eigenform,
)
from .cosets import coset_label, operator_cosets, operator_degree
from .elliptic import delta_q, eisenstein_q
from .engine import (
    CertificationError,
    default_y11,
    eigenvalue as compute_eigenvalue,
    quotient_budget,
    snap_to_integer,
)

_DISPLAY_GUARD_DIGITS = 4


# -- rendering ---------------------------------------------------------------


def _sci(q, sig: int, direction) -> str:
    """Scientific-notation string of the exact rational q, rounded outward."""
    q = mpq(q)
    if q == 0:
        return "0"
    ctx = DecimalContext(prec=sig, rounding=direction, Emax=10**9, Emin=-(10**9))
    d = ctx.divide(int(q.numerator), int(q.denominator))
    return format(d, "e")


def _fmt_interval(lo, hi, digits: int) -> str:
    sig = digits + _DISPLAY_GUARD_DIGITS
    return f"[{_sci(lo, sig, ROUND_FLOOR)}, {_sci(hi, sig, ROUND_CEILING)}]"


def _fmt_box(box: ComplexBox, digits: int) -> str:
    re = _fmt_interval(mpq(box.re.lo), mpq(box.re.hi), digits)
    im = _fmt_interval(mpq(box.im.lo), mpq(box.im.hi), digits)
    return f"{re} + {im}*i"


def _print_result(result, digits: int) -> None:
    click.echo(f"form = {result.name}")
    click.echo(
        f"prime = {result.prime}  operator = {result.operator}  mode = {result.mode}"
    )
    click.echo(f"normalized = {_fmt_box(result.normalized, digits)}")
    click.echo(f"raw = {_fmt_box(result.raw_ratio, digits)}")
    if result.snapped is None:
        click.echo("snapped = none")
    else:
        click.echo(f"snapped = {result.snapped}")
    click.echo(result.timing_line(), err=True)


# -- shared option handling --------------------------------------------------


def _resolve_form(form, form_file):
    if (form is None) == (form_file is None):
        raise click.UsageError("provide exactly one of --form or --form-file")
    try:
        if form is not None:
            return catalog_form(form)
        return load_eigenform(form_file)
    except CatalogError as exc:
        raise click.UsageError(str(exc)) from None
    except OSError as exc:
        raise click.UsageError(f"cannot read {form_file}: {exc}") from None


def _parse_y11(text):
    if text is None:
        return None
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise click.UsageError(f"cannot parse --y11 value {text!r}") from None
    if value <= 0:
        raise click.UsageError("--y11 must be positive")
    return value


@click.group()
def main():
    """Hecke eigenvalues of degree-2 Siegel eigenforms, certified."""


# -- eigenvalue ----------------------------------------------------------------


@main.command("eigenvalue")
@click.option("--form", help="Name of a built-in form (see `verify --list`).")
@click.option(
    "--form-file",
    type=click.Path(exists=True, dir_okay=False),
    help="Path to an eigenform document.",
)
@click.option("--prime", type=int, required=True)
@click.option(
    "--operator",
    "--op",
    "operator",
    type=click.Choice(["tp", "tp2_1", "tp2"]),
    default="tp",
    show_default=True,
)
@click.option("--digits", type=int, default=5, show_default=True)
@click.option("--precision-bits", type=int, default=None)
@click.option("--y11", default=None, help="Evaluation point parameter (rational).")
@click.option("--trace-bound", type=int, default=None)
@click.option(
    "--mode",
    type=click.Choice(["heuristic", "rigorous"]),
    default="heuristic",
    show_default=True,
)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
@click.option(
    "--symmetry",
    type=click.Choice(["on", "off"]),
    default="off",
    show_default=True,
)
@click.option("--server", default=None, help="POST to a running service instead.")
def eigenvalue_cmd(
    form,
    form_file,
    prime,
    operator,
    digits,
    precision_bits,
    y11,
    trace_bound,
    mode,
    threads,
    cache_dir,
    symmetry,
    server,
):
    """Certified eigenvalue box and its snapped integer."""
    y11_value = _parse_y11(y11)
    if server is not None:
        _remote_eigenvalue(
            server,
            form,
            form_file,
            prime,
            operator,
            digits,
            precision_bits,
            y11_value,
            trace_bound,
            mode,
            threads,
            symmetry,
        )
        return
    spec = _resolve_form(form, form_file)
    try:
        result = compute_eigenvalue(
            spec,
            prime,
            operator,
            digits,
            mode=mode,
            y11=y11_value,
            precision_bits=precision_bits,
            threads=threads,
            trace_bound=trace_bound,
            symmetry=(symmetry == "on"),
            cache_dir=cache_dir,
        )
    except CertificationError as exc:
        click.echo(f"certification failure: {exc}", err=True)
        raise SystemExit(1)
    except (CatalogError, ValueError) as exc:
        raise click.UsageError(str(exc)) from None
    _print_result(result, digits)


def _remote_eigenvalue(
    server,
    form,
    form_file,
    prime,
    operator,
    digits,
    precision_bits,
    y11_value,
    trace_bound,
    mode,
    threads,
    symmetry,
):
    import httpx

    from .catalog import eigenform_document, parse_eigenform

    if (form is None) == (form_file is None):
        raise click.UsageError("provide exactly one of --form or --form-file")
    document = None
    if form_file is not None:
        document = eigenform_document(load_eigenform(form_file))
    payload = {
        "form": form,
        "document": document,
        "prime": prime,
        "operator": operator,
        "digits": digits,
        "precision_bits": precision_bits,
        "y11": None if y11_value is None else str(y11_value),
        "trace_bound": trace_bound,
        "mode": mode,
        "threads": threads,
        "symmetry": symmetry == "on",
    }
    url = server.rstrip("/") + "/eigenvalue"
    try:
        response = httpx.post(url, json=payload, timeout=None)
    except httpx.HTTPError as exc:
        raise click.ClickException(f"request to {url} failed: {exc}")
    if response.status_code == 422 or response.status_code == 400:
        raise click.UsageError(f"server rejected the request: {response.text}")
    if response.status_code != 200:
        click.echo(f"server error {response.status_code}: {response.text}", err=True)
        raise SystemExit(1)
    body = response.json()
    f = BoxField(96)

    def unbox(data):
        re = f.real(Fraction(data["re"][0]), Fraction(data["re"][1]))
        im = f.real(Fraction(data["im"][0]), Fraction(data["im"][1]))
        return ComplexBox(re, im)

    click.echo(f"form = {body['name']}")
    click.echo(
        f"prime = {body['prime']}  operator = {body['operator']}  mode = {body['mode']}"
    )
    click.echo(f"normalized = {_fmt_box(unbox(body['normalized']), digits)}")
    click.echo(f"raw = {_fmt_box(unbox(body['raw']), digits)}")
    snapped = body.get("snapped")
    click.echo(f"snapped = {snapped if snapped is not None else 'none'}")
    click.echo(body["timing"], err=True)


# -- cache management ----------------------------------------------------------


@main.command("expand-generators")
@click.option("--trace", "--trace-bound", "trace_bound", type=int, required=True)
@click.option("--out", "--cache-dir", "cache_dir", type=click.Path(file_okay=False))
def expand_generators_cmd(trace_bound, cache_dir):
    """Materialize the four generator expansions up to a trace bound."""
    if trace_bound < 0:
        raise click.UsageError("--trace must be nonnegative")
    store = SeriesStore(cache_dir)
    paths = store.ensure_generators(trace_bound)
    for path in paths:
        click.echo(str(path))


@main.command("list-cosets")
@click.option(
    "--op",
    "--operator",
    "operator",
    type=click.Choice(["tp", "tp2_1"]),
    default="tp",
    show_default=True,
)
@click.option("--prime", type=int, required=True)
def list_cosets_cmd(operator, prime):
    """Coset representatives, one 4x4 matrix per line, row-major."""
    try:
        reps = operator_cosets(operator, prime)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    for rep in reps:
        click.echo(" ".join(str(x) for row in rep.matrix() for x in row))


# -- verify --------------------------------------------------------------------


def _verify_cache(store):
    problems = store.verify()
    return "; ".join(problems) if problems else None


def _verify_cosets():
    for p in (2, 3):
        for operator in ("tp", "tp2_1"):
            reps = operator_cosets(operator, p)
            expected = operator_degree(operator, p)
            if len(reps) != expected:
                return f"{operator}, p={p}: {len(reps)} reps, expected {expected}"
            similitude = p if operator == "tp" else p * p
            if any(rep.similitude != similitude for rep in reps):
                return f"{operator}, p={p}: wrong similitude"
            labels = {coset_label(rep) for rep in reps}
            if len(labels) != expected:
                return f"{operator}, p={p}: duplicate cosets"
    return None


def _verify_budget():
    ex, ey = quotient_budget(mpq(1, 10**10), Fraction(1, 2), 1, 1)
    if not (mpq(ex) <= mpq(1, 4 * 10**10) and mpq(ey) <= mpq(1, 4 * 10**10)):
        return "example budgets exceed the bound"
    rng = random.Random(20240915)
    ctx = gmpy2.context(precision=200)
    for _ in range(25):
        x = mpfr(rng.uniform(-5, 5)) + mpfr(rng.uniform(-5, 5)) * 1j
        y = mpfr(rng.uniform(0.5, 5)) * (1 if rng.random() < 0.5 else -1)
        eps = mpq(1, 10 ** rng.randint(3, 12))
        ex, ey = quotient_budget(eps, Fraction(1, 2), abs(y) / 2, 2 * abs(x / y) + 1)
        za = (x + ex) / (y + ey)
        z = x / y
        if abs(z - za) >= mpfr(eps.numerator) / eps.denominator:
            return f"quotient bound violated at x={x}, y={y}"
    del ctx
    return None


def _verify_diagonal(store, trace_bound):
    e4 = eisenstein_q(4, trace_bound)
    e6 = eisenstein_q(6, trace_bound)
    tau = delta_q(trace_bound)
    pairs = [("E4", e4), ("E6", e6)]
    for name, oracle in pairs:
        diag = store.series(name, trace_bound).diagonal()
        for a in range(trace_bound + 1):
            for c in range(trace_bound + 1 - a):
                got = diag.get((a, c), mpq(0))
                want = oracle[a] * oracle[c]
                if got != want:
                    return f"{name} diagonal ({a},{c}): {got} != {want}"
    if store.series("chi10", trace_bound).diagonal():
        return "chi10 diagonal does not vanish"
    diag12 = store.series("chi12", trace_bound).diagonal()
    kappa = diag12.get((1, 1))
    if not kappa:
        return "chi12 diagonal misses (1,1)"
    for a in range(trace_bound + 1):
        for c in range(trace_bound + 1 - a):
            got = diag12.get((a, c), mpq(0))
            want = kappa * tau[a] * tau[c]
            if got != want:
                return f"chi12 diagonal ({a},{c}): {got} != {want}"
    return None


def _verify_catalog_eigen(store, quick):
    entries = builtin_catalog()
    if quick:
        keep = {"e4", "chi10", "ups20"}
        entries = [spec for spec in entries if spec.name in keep]
    for spec in entries:
        base = default_y11(2)
        boxes = []
        for y11 in (base, base + Fraction(3, 10)):
            result = compute_eigenvalue(
                spec, 2, "tp", 6, y11=y11, trace_bound=16, store=store
            )
            boxes.append(result.normalized)
        if not boxes[0].overlaps(boxes[1]):
            return f"{spec.name}: eigenvalue boxes at two points do not overlap"
    return None


def _verify_snapping():
    f = BoxField(64)
    tight = ComplexBox(f.real(Fraction(39, 10), Fraction(41, 10)), f.real(0))
    if snap_to_integer(tight) != 4:
        return "radius-0.1 box around 4 should snap to 4"
    wide = ComplexBox(f.real(4, 6), f.real(0))
    if snap_to_integer(wide) is not None:
        return "radius-1 box must not snap"
    offzero = ComplexBox(f.real(5), f.real(Fraction(1, 2), 1))
    if snap_to_integer(offzero) is not None:
        return "imaginary part away from zero must not snap"
    return None


@main.command("verify")
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
@click.option("--quick", is_flag=True, help="Smaller trace bounds, fewer forms.")
@click.option("--list", "list_forms", is_flag=True, help="List built-in forms.")
def verify_cmd(cache_dir, quick, list_forms):
    """Run the invariant suites; exit 1 if any fails."""
    if list_forms:
        for spec in builtin_catalog():
            field = "rational" if spec.field is None else f"degree {spec.field.degree}"
            click.echo(
                f"{spec.name}  weight {spec.weight}  {len(spec.terms)} terms  {field}"
            )
        return
    store = SeriesStore(cache_dir)
    trace = 8 if quick else 12
    checks = [
        ("cache-manifest", lambda: _verify_cache(store)),
        ("coset-degrees", _verify_cosets),
        ("quotient-budget", _verify_budget),
        ("diagonal-restriction", lambda: _verify_diagonal(store, trace)),
        ("snapping", _verify_snapping),
        ("catalog-eigen-p2", lambda: _verify_catalog_eigen(store, quick)),
    ]
    failures = []
    for label, fn in checks:
        try:
            problem = fn()
        except Exception as exc:  # noqa: BLE001 - verdict line, not a crash
            problem = f"{type(exc).__name__}: {exc}"
        if problem is None:
            click.echo(f"PASS {label}")
        else:
            click.echo(f"FAIL {label}: {problem}")
            failures.append(label)
    if failures:
        raise SystemExit(1)


# -- bench ---------------------------------------------------------------------


@main.command("bench")
@click.option("--form", default="ups20", show_default=True)
@click.option("--prime", type=int, default=13, show_default=True)
@click.option(
    "--operator",
    "--op",
    "operator",
    type=click.Choice(["tp", "tp2_1", "tp2"]),
    default="tp",
    show_default=True,
)
@click.option("--digits", type=int, default=5, show_default=True)
@click.option("--threads", type=int, default=8, show_default=True)
@click.option(
    "--mode",
    type=click.Choice(["heuristic", "rigorous"]),
    default="heuristic",
    show_default=True,
)
@click.option("--y11", default=None)
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
def bench_cmd(form, prime, operator, digits, threads, mode, y11, cache_dir):
    """Timing comparison between one worker and a pool; boxes must agree."""
    if threads < 2:
        raise click.UsageError("--threads must be at least 2 to compare")
    spec = _resolve_form(form, None)
    y11_value = _parse_y11(y11)
    store = SeriesStore(cache_dir)
    results = {}
    try:
        # Warm caches (series files, Cohen table) so the measured runs
        # compare summation only.
        warmup = compute_eigenvalue(
            spec, prime, operator, digits, mode=mode, y11=y11_value, store=store
        )
        click.echo(f"warmup: {warmup.timing_line()}", err=True)
        for count in (1, threads):
            results[count] = compute_eigenvalue(
                spec,
                prime,
                operator,
                digits,
                mode=mode,
                y11=y11_value,
                threads=count,
                store=store,
            )
            click.echo(f"threads={count}: {results[count].timing_line()}")
    except CertificationError as exc:
        click.echo(f"certification failure: {exc}", err=True)
        raise SystemExit(1)
    base, pooled = results[1], results[threads]
    speedup = base.wall_ms / pooled.wall_ms if pooled.wall_ms > 0 else float("inf")
    identical = (
        base.normalized.to_bytes() == pooled.normalized.to_bytes()
        and base.raw_ratio.to_bytes() == pooled.raw_ratio.to_bytes()
    )
    click.echo(f"speedup = {speedup:.2f}")
    click.echo(f"identical = {'true' if identical else 'false'}")
    if not identical:
        raise SystemExit(1)


# -- serve ---------------------------------------------------------------------


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8750, show_default=True)
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
def serve_cmd(host, port, cache_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(store=SeriesStore(cache_dir))
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    sys.exit(main())
