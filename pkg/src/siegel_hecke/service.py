"""HTTP face of the eigenvalue engine.

A small JSON API over the same operations the command line exposes.  Exact
values travel as strings: interval endpoints as ``"num/den"`` rationals and
snapped eigenvalues as decimal strings, since they routinely exceed what a
JSON consumer can hold in a double.  Approximate floats ride along for
display only.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional

from fastapi import FastAPI, HTTPException, Query
from gmpy2 import mpq
from pydantic import BaseModel, Field
from sympy import isprime

from .boxes import ComplexBox
from .cache import SeriesStore
from .catalog import CatalogError, builtin_catalog, catalog_form, parse_eigenform
from .cosets import operator_cosets
from .engine import CertificationError, eigenvalue as compute_eigenvalue


class EigenvalueRequest(BaseModel):
    form: Optional[str] = None
    document: Optional[dict] = None
    prime: int
    operator: str = "tp"
    digits: int = Field(default=5, ge=1)
    mode: str = "heuristic"
    y11: Optional[str] = None
    precision_bits: Optional[int] = Field(default=None, ge=2)
    trace_bound: Optional[int] = Field(default=None, ge=0)
    threads: int = Field(default=1, ge=1)
    symmetry: bool = False


class BoxPayload(BaseModel):
    re: List[str]
    im: List[str]
    approx_re: float
    approx_im: float


class EigenvalueResponse(BaseModel):
    name: str
    prime: int
    operator: str
    mode: str
    normalized: BoxPayload
    raw: BoxPayload
    snapped: Optional[str]
    coset_count: int
    precision_bits: int
    trace_bounds: Dict[str, int]
    wall_ms: float
    escalations: int
    y11: str
    timing: str


class FormSummary(BaseModel):
    name: str
    weight: int
    terms: int
    field_degree: Optional[int]


def _box_payload(box: ComplexBox) -> BoxPayload:
    def bounds(iv):
        return [str(mpq(iv.lo)), str(mpq(iv.hi))]

    return BoxPayload(
        re=bounds(box.re),
        im=bounds(box.im),
        approx_re=float(box.re.mid()),
        approx_im=float(box.im.mid()),
    )


def create_app(store: Optional[SeriesStore] = None) -> FastAPI:
    app = FastAPI(title="siegel-hecke")
    series_store = store if store is not None else SeriesStore()

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/forms", response_model=List[FormSummary])
    def forms() -> List[FormSummary]:
        return [
            FormSummary(
                name=spec.name,
                weight=spec.weight,
                terms=len(spec.terms),
                field_degree=None if spec.field is None else spec.field.degree,
            )
            for spec in builtin_catalog()
        ]

    @app.get("/cosets")
    def cosets(
        operator: str = Query(default="tp"), prime: int = Query(...)
    ) -> dict:
        if not isprime(prime):
            raise HTTPException(status_code=400, detail=f"{prime} is not prime")
        try:
            reps = operator_cosets(operator, prime)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {
            "operator": operator,
            "prime": prime,
            "count": len(reps),
            "reps": [[x for row in rep.matrix() for x in row] for rep in reps],
        }

    @app.post("/eigenvalue", response_model=EigenvalueResponse)
    def eigenvalue(request: EigenvalueRequest) -> EigenvalueResponse:
        if (request.form is None) == (request.document is None):
            raise HTTPException(
                status_code=400,
                detail="provide exactly one of 'form' and 'document'",
            )
        try:
            if request.form is not None:
                spec = catalog_form(request.form)
            else:
                spec = parse_eigenform(request.document)
            y11 = None if request.y11 is None else Fraction(request.y11)
        except (CatalogError, ValueError, ZeroDivisionError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        try:
            result = compute_eigenvalue(
                spec,
                request.prime,
                request.operator,
                request.digits,
                mode=request.mode,
                y11=y11,
                precision_bits=request.precision_bits,
                threads=request.threads,
                trace_bound=request.trace_bound,
                symmetry=request.symmetry,
                store=series_store,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        except CertificationError as exc:
            raise HTTPException(
                status_code=500, detail=f"certification failure: {exc}"
            ) from None
        return EigenvalueResponse(
            name=result.name,
            prime=result.prime,
            operator=result.operator,
            mode=result.mode,
            normalized=_box_payload(result.normalized),
            raw=_box_payload(result.raw_ratio),
            snapped=None if result.snapped is None else str(result.snapped),
            coset_count=result.coset_count,
            precision_bits=result.precision_bits,
            trace_bounds=dict(result.trace_bounds),
            wall_ms=result.wall_ms,
            escalations=result.escalations,
            y11=str(result.y11),
            timing=result.timing_line(),
        )

    return app
