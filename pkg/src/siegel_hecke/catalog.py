"""Eigenform descriptions and the built-in catalog.

An eigenform is described by a weight and a list of terms, each term a
monomial ``E4^i E6^j chi10^l chi12^m`` with a coefficient in either Q or a
number field Q(alpha).  The field is given by an integer polynomial together
with a complex rectangle isolating exactly one of its roots; isolation is
certified with the interval Newton operator, and the same operator refines
the root to working precision when coefficients are embedded as boxes.

Documents are JSON::

    {
      "name": "ups20",
      "weight": 20,
      "field": {"poly": [-5, 0, 1],
                "root": {"re": ["2236/1000", "2237/1000"], "im": ["0", "0"]}},
      "terms": [{"coeff": ["-1"], "expo": [2, 0, 0, 1]}, ...]
    }

``poly`` lists integer coefficients from the constant term upward.  All
rationals are written as ``"num/den"`` strings (plain integers and exact
decimal strings are also accepted) so that no value passes through floating
point.  ``field`` is omitted for forms with rational coefficients, and each
``coeff`` lists the coordinates of the coefficient in the power basis
``1, alpha, alpha^2, ...`` of the field generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .boxes import (
    BoxDivisionError,
    BoxField,
    ComplexBox,
    IntervalDomainError,
    RealInterval,
)

GENERATOR_WEIGHTS = (4, 6, 10, 12)

# Certification precision used when a document is parsed; embeddings re-run
# the refinement at the caller's working precision.
_PARSE_PRECISION = 128


class CatalogError(ValueError):
    """Malformed eigenform document, or field data that cannot be certified."""


@dataclass(frozen=True)
class FieldSpec:
    """Integer polynomial plus a rectangle isolating exactly one root.

    The generator of the coefficient field is the unique root of
    ``polynomial`` inside the rectangle; see :func:`refine_root` for the
    certification.  Coefficients run from the constant term upward.
    """

    polynomial: Tuple[int, ...]
    root_re: Tuple[Fraction, Fraction]
    root_im: Tuple[Fraction, Fraction]

    @property
    def degree(self) -> int:
        return len(self.polynomial) - 1


@dataclass(frozen=True)
class Term:
    """One monomial in the generators with its coefficient.

    ``coefficient`` holds power-basis coordinates over the field generator
    (a single entry for rational forms); ``exponents`` is ``(i, j, l, m)``
    for ``E4^i E6^j chi10^l chi12^m``.
    """

    coefficient: Tuple[Fraction, ...]
    exponents: Tuple[int, int, int, int]

    @property
    def weight(self) -> int:
        return sum(w * e for w, e in zip(GENERATOR_WEIGHTS, self.exponents))


@dataclass(frozen=True)
class EigenformSpec:
    """A weighted-homogeneous polynomial in the four generators.

    ``field`` is ``None`` for rational coefficients.  The attributes
    ``monomials`` and ``coefficient_boxes`` are the evaluation protocol the
    eigenvalue driver consumes.
    """

    name: str
    weight: int
    field: Optional[FieldSpec]
    terms: Tuple[Term, ...]

    @property
    def monomials(self) -> List[Tuple[int, int, int, int]]:
        return [term.exponents for term in self.terms]

    def coefficient_boxes(self, field: BoxField) -> List[ComplexBox]:
        return embed_algebraic(self, field.prec, field=field)


# -- root certification ----------------------------------------------------


def _mid_q(iv: RealInterval) -> mpq:
    return (mpq(iv.lo) + mpq(iv.hi)) / 2


def _poly_box(f: BoxField, coeffs: Sequence, z: ComplexBox) -> ComplexBox:
    acc = f.complex(f.real(coeffs[-1]))
    for c in reversed(coeffs[:-1]):
        acc = acc * z + f.complex(f.real(c))
    return acc


# Refined roots keyed by (field spec, precision); values are exact endpoint
# rationals, so they can be replayed into any BoxField.
_ROOT_CACHE: Dict[Tuple[FieldSpec, int], Tuple[mpq, mpq, mpq, mpq]] = {}


def refine_root(fspec: FieldSpec, precision_bits: int) -> Tuple[mpq, mpq, mpq, mpq]:
    """Certify and refine the root rectangle; returns exact box endpoints.

    Uses the interval Newton operator N(X) = m - p(m)/p'(X) with m the
    midpoint of X.  Every root z in X satisfies z = m - p(m)/I for some I in
    the box evaluation of p' over X (I is the mean of p' along the segment
    from m to z, and boxes are convex), so roots survive X <- N(X) /\\ X.
    When 0 is outside p'(X) the rectangle holds at most one root, and
    N(X) inside X forces existence: z -> m - p(m)/I(z) maps X into itself
    and its fixed point is a root.  Raises CatalogError when the rectangle
    provably contains no root, when p'(X) contains zero (two or more roots,
    or a rectangle too wide to certify), or when contraction stalls.

    The returned box has radius below 2^-(precision_bits - 2) and keeps the
    root strictly interior, so refinements at higher precision are nested
    inside refinements at lower precision.
    """
    key = (fspec, int(precision_bits))
    hit = _ROOT_CACHE.get(key)
    if hit is not None:
        return hit

    coeffs = fspec.polynomial
    if len(coeffs) < 2 or coeffs[-1] == 0:
        raise CatalogError("defining polynomial must have a nonzero leading term")
    deriv = tuple(i * c for i, c in enumerate(coeffs))[1:]

    magnitude = max(abs(b) for b in fspec.root_re + fspec.root_im)
    prec = int(precision_bits) + 16 + max(0, int(magnitude)).bit_length()
    f = BoxField(prec)
    box = ComplexBox(
        f.real(fspec.root_re[0], fspec.root_re[1]),
        f.real(fspec.root_im[0], fspec.root_im[1]),
    )
    target = mpq(1, 2 ** (precision_bits + 2))
    certified = False
    prev_radius = None
    stall = 0
    for _ in range(512):
        mid = ComplexBox(f.real(_mid_q(box.re)), f.real(_mid_q(box.im)))
        try:
            newton = mid - _poly_box(f, coeffs, mid) / _poly_box(f, deriv, box)
        except BoxDivisionError:
            raise CatalogError(
                "derivative box contains zero: the rectangle does not "
                "isolate a simple root (it may contain two or more roots)"
            ) from None
        try:
            shrunk = newton.intersect(box)
        except IntervalDomainError:
            raise CatalogError(
                "rectangle contains no root of the defining polynomial"
            ) from None
        if box.contains_box(newton):
            certified = True
        box = shrunk
        radius = mpq(box.radius_up())
        if certified and radius <= target:
            break
        if prev_radius is not None and radius >= prev_radius:
            stall += 1
            if stall >= 3:
                break
        else:
            stall = 0
        prev_radius = radius
    if not certified:
        raise CatalogError(
            "interval Newton failed to contract; root isolation not certified"
        )
    # Keep the root strictly interior so that a tighter refinement is nested
    # inside this one.
    box = box.widen(mpq(1, 2 ** (precision_bits + 2)))
    if mpq(box.radius_up()) > mpq(1, 2 ** (precision_bits - 2)):
        raise CatalogError("root refinement stalled above the requested precision")
    result = (mpq(box.re.lo), mpq(box.re.hi), mpq(box.im.lo), mpq(box.im.hi))
    _ROOT_CACHE[key] = result
    return result


def embed_algebraic(
    spec: EigenformSpec, precision_bits: int, field: Optional[BoxField] = None
) -> List[ComplexBox]:
    """Coefficient boxes for every term, in term order.

    Rational coefficients convert directly (radius at most one ulp); for a
    number field the root rectangle is refined to the working precision and
    each power-basis polynomial is evaluated at it in box arithmetic.
    """
    f = field if field is not None else BoxField(precision_bits)
    if spec.field is None:
        return [f.complex(f.real(term.coefficient[0])) for term in spec.terms]
    re_lo, re_hi, im_lo, im_hi = refine_root(spec.field, precision_bits)
    root = ComplexBox(f.real(re_lo, re_hi), f.real(im_lo, im_hi))
    return [_poly_box(f, term.coefficient, root) for term in spec.terms]


# -- documents ---------------------------------------------------------------


def _parse_rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise CatalogError(f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise CatalogError(f"{where}: cannot parse rational {value!r}") from None
    if isinstance(value, float):
        raise CatalogError(
            f"{where}: floats are not accepted; write rationals as strings"
        )
    raise CatalogError(f"{where}: expected a rational, got {type(value).__name__}")


def _parse_integer(value, where: str) -> int:
    q = _parse_rational(value, where)
    if q.denominator != 1:
        raise CatalogError(f"{where}: expected an integer, got {q}")
    return int(q)


def _parse_bounds(value, where: str) -> Tuple[Fraction, Fraction]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise CatalogError(f"{where}: expected a [lo, hi] pair")
    lo = _parse_rational(value[0], f"{where}[0]")
    hi = _parse_rational(value[1], f"{where}[1]")
    if lo > hi:
        raise CatalogError(f"{where}: bounds out of order")
    return (lo, hi)


def _parse_field(value) -> FieldSpec:
    if not isinstance(value, dict):
        raise CatalogError("field: expected an object with poly and root")
    try:
        raw_poly = value["poly"]
        raw_root = value["root"]
    except KeyError as exc:
        raise CatalogError(f"field: missing key {exc.args[0]!r}") from None
    if not isinstance(raw_poly, (list, tuple)) or len(raw_poly) < 2:
        raise CatalogError("field.poly: expected at least two integer coefficients")
    poly = tuple(
        _parse_integer(c, f"field.poly[{pos}]") for pos, c in enumerate(raw_poly)
    )
    if poly[-1] == 0:
        raise CatalogError("field.poly: leading coefficient must be nonzero")
    if not isinstance(raw_root, dict):
        raise CatalogError("field.root: expected an object with re and im")
    try:
        re = _parse_bounds(raw_root["re"], "field.root.re")
        im = _parse_bounds(raw_root["im"], "field.root.im")
    except KeyError as exc:
        raise CatalogError(f"field.root: missing key {exc.args[0]!r}") from None
    return FieldSpec(polynomial=poly, root_re=re, root_im=im)


def parse_eigenform(document) -> EigenformSpec:
    """Parse and validate an eigenform document.

    Accepts a JSON string, bytes, or an already-decoded mapping.  Checks
    structure, weighted homogeneity 4i + 6j + 10l + 12m = weight for every
    term, and, for algebraic fields, certified isolation of a single root.
    Raises CatalogError with a description of the first failure.
    """
    if isinstance(document, (bytes, bytearray)):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CatalogError(f"document is not UTF-8: {exc}") from None
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"document is not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise CatalogError("document must be a JSON object")

    name = document.get("name")
    if not isinstance(name, str) or not name.strip():
        raise CatalogError("name: expected a nonempty string")
    if "weight" not in document:
        raise CatalogError("weight: missing")
    weight = _parse_integer(document["weight"], "weight")
    if weight <= 0:
        raise CatalogError("weight: must be positive")

    raw_field = document.get("field")
    fspec = None if raw_field is None else _parse_field(raw_field)
    coeff_len_cap = fspec.degree if fspec is not None else 1

    raw_terms = document.get("terms")
    if not isinstance(raw_terms, (list, tuple)) or not raw_terms:
        raise CatalogError("terms: expected a nonempty list")
    terms = []
    for pos, entry in enumerate(raw_terms):
        where = f"terms[{pos}]"
        if not isinstance(entry, dict):
            raise CatalogError(f"{where}: expected an object with coeff and expo")
        try:
            raw_coeff = entry["coeff"]
            raw_expo = entry["expo"]
        except KeyError as exc:
            raise CatalogError(f"{where}: missing key {exc.args[0]!r}") from None
        if not isinstance(raw_coeff, (list, tuple)) or not raw_coeff:
            raise CatalogError(f"{where}.coeff: expected a nonempty list")
        if len(raw_coeff) > coeff_len_cap:
            raise CatalogError(
                f"{where}.coeff: {len(raw_coeff)} entries exceed the field degree"
                f" ({coeff_len_cap})"
            )
        coeff = tuple(
            _parse_rational(c, f"{where}.coeff[{cpos}]")
            for cpos, c in enumerate(raw_coeff)
        )
        if not isinstance(raw_expo, (list, tuple)) or len(raw_expo) != 4:
            raise CatalogError(f"{where}.expo: expected four exponents")
        expo = tuple(
            _parse_integer(e, f"{where}.expo[{epos}]")
            for epos, e in enumerate(raw_expo)
        )
        if any(e < 0 for e in expo):
            raise CatalogError(f"{where}.expo: exponents must be nonnegative")
        term = Term(coefficient=coeff, exponents=expo)
        if term.weight != weight:
            raise CatalogError(
                f"{where}: monomial {expo} has weight {term.weight},"
                f" form has weight {weight}"
            )
        terms.append(term)

    spec = EigenformSpec(
        name=name.strip(), weight=weight, field=fspec, terms=tuple(terms)
    )
    if fspec is not None:
        refine_root(fspec, _PARSE_PRECISION)
    return spec


def _rational_str(q: Fraction) -> str:
    return str(q)


def eigenform_document(spec: EigenformSpec) -> dict:
    """The document for a spec, as a plain dict (see module docstring)."""
    doc: dict = {"name": spec.name, "weight": spec.weight}
    if spec.field is not None:
        doc["field"] = {
            "poly": [int(c) for c in spec.field.polynomial],
            "root": {
                "re": [_rational_str(b) for b in spec.field.root_re],
                "im": [_rational_str(b) for b in spec.field.root_im],
            },
        }
    doc["terms"] = [
        {
            "coeff": [_rational_str(c) for c in term.coefficient],
            "expo": list(term.exponents),
        }
        for term in spec.terms
    ]
    return doc


def serialize_eigenform(spec: EigenformSpec) -> str:
    return json.dumps(eigenform_document(spec), indent=2) + "\n"


def load_eigenform(path) -> EigenformSpec:
    with open(path, "rb") as handle:
        return parse_eigenform(handle.read())


# -- built-in catalog --------------------------------------------------------


def _rational_form(name: str, weight: int, entries) -> EigenformSpec:
    terms = tuple(
        Term(coefficient=(Fraction(c),), exponents=tuple(e)) for e, c in entries
    )
    return EigenformSpec(name=name, weight=weight, field=None, terms=terms)


def builtin_catalog() -> List[EigenformSpec]:
    """The bundled eigenforms.

    The six rational cusp eigenforms of weights 20 through 26 that are not
    lifts, written as polynomials in the generators, followed by the four
    generators themselves as one-term eigenforms.  Higher-weight eigenforms
    live over number fields of growing degree and are not bundled; supply
    them as documents instead.
    """
    return [
        _rational_form(
            "ups20",
            20,
            [
                ((2, 0, 0, 1), -1),
                ((1, 1, 1, 0), -1),
                ((0, 0, 2, 0), 1785600),
            ],
        ),
        _rational_form(
            "ups22",
            22,
            [
                ((3, 0, 1, 0), 61),
                ((1, 1, 0, 1), -30),
                ((0, 2, 1, 0), 5),
                ((0, 0, 1, 1), -80870400),
            ],
        ),
        _rational_form(
            "ups24a",
            24,
            [
                ((3, 0, 0, 1), -67),
                ((2, 1, 1, 0), 78),
                ((1, 0, 2, 0), -274492800),
                ((0, 2, 0, 1), 25),
                ((0, 0, 0, 2), 71539200),
            ],
        ),
        _rational_form(
            "ups24b",
            24,
            [
                ((3, 0, 0, 1), 70),
                ((2, 1, 1, 0), -69),
                ((1, 0, 2, 0), -214341120),
                ((0, 2, 0, 1), 53),
                ((0, 0, 0, 2), -137604096),
            ],
        ),
        _rational_form(
            "ups26a",
            26,
            [
                ((4, 0, 1, 0), -22),
                ((2, 1, 0, 1), -3),
                ((1, 2, 1, 0), 31),
                ((1, 0, 1, 1), -96609024),
                ((0, 1, 2, 0), -13806720),
            ],
        ),
        _rational_form(
            "ups26b",
            26,
            [
                ((4, 0, 1, 0), 973),
                ((2, 1, 0, 1), 390),
                ((1, 2, 1, 0), -1255),
                ((1, 0, 1, 1), 3927813120),
                ((0, 1, 2, 0), -4438886400),
            ],
        ),
        _rational_form("e4", 4, [((1, 0, 0, 0), 1)]),
        _rational_form("e6", 6, [((0, 1, 0, 0), 1)]),
        _rational_form("chi10", 10, [((0, 0, 1, 0), 1)]),
        _rational_form("chi12", 12, [((0, 0, 0, 1), 1)]),
    ]


def catalog_form(name: str) -> EigenformSpec:
    wanted = name.strip().lower()
    for spec in builtin_catalog():
        if spec.name == wanted:
            return spec
    known = ", ".join(spec.name for spec in builtin_catalog())
    raise CatalogError(f"unknown form {name!r}; built-in forms: {known}")
