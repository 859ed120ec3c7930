"""HTTP service exposing the norm engine, bounds, verification cases and
searches.  The CLI talks to this app (in-process by default), so every
computation has a single entry point.

Error contract: bad input -> 400 with detail {"kind": "input", ...};
resource caps -> 400 with detail {"kind": "cap", "required": N, ...}.
"""

from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .bounds import bounds_table, c_bounds, table_to_csv
from .constructions import by_name
from .modmap import (
    MapFileError,
    Witness,
    map_from_dict,
    map_to_dict,
    tensor,
    witness_value,
)
from .norms import EngineOptions, norm_report
from .search import CapExceeded, best_record, run_perm_search, search_unitary
from .verify import UnknownCaseError, run_cases


class OptionsIn(BaseModel):
    restarts: int = 32
    max_iter: int = 500
    tol: float = 1e-12
    seed: int = 0

    def to_engine(self):
        return EngineOptions(
            restarts=self.restarts, max_iter=self.max_iter, tol=self.tol, seed=self.seed
        )


class MapIn(BaseModel):
    m: int
    n: int
    columns: list


class WitnessIn(BaseModel):
    k: int
    x: list
    value: float = 0.0


class NormRequest(BaseModel):
    map: MapIn
    options: OptionsIn = Field(default_factory=OptionsIn)
    certified_op: Optional[float] = None


class CheckWitnessRequest(BaseModel):
    map: MapIn
    witness: WitnessIn


class BoundsRequest(BaseModel):
    m: int
    n: Any  # positive int or the string "inf"


class TableRequest(BaseModel):
    m_max: int
    n_max: int


class VerifyRequest(BaseModel):
    selector: str = "all"
    seeds: int = 100
    tol: float = 1e-6
    options: OptionsIn = Field(default_factory=OptionsIn)
    map: Optional[MapIn] = None


class SearchRequest(BaseModel):
    class_tag: str
    m: int
    n: int
    iters: int = 2000
    restarts: int = 8
    seed: int = 0
    cap: int = 10**6
    skip_shards: list = Field(default_factory=list)
    options: OptionsIn = Field(default_factory=OptionsIn)


class TensorRequest(BaseModel):
    map_a: MapIn
    map_b: MapIn


def _input_error(message):
    return HTTPException(status_code=400, detail={"kind": "input", "message": str(message)})


def _parse_map(model):
    try:
        return map_from_dict(model.model_dump())
    except MapFileError as e:
        raise _input_error(e)


app = FastAPI(title="cbnorm", version=__version__)


@app.get("/api/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/api/norm")
def norm(req: NormRequest):
    T = _parse_map(req.map)
    if req.certified_op is not None and req.certified_op < 0:
        raise _input_error("certified_op must be nonnegative")
    rep = norm_report(T, req.options.to_engine(), certified_op=req.certified_op)
    return rep.to_dict()


@app.post("/api/check-witness")
def check_witness(req: CheckWitnessRequest):
    T = _parse_map(req.map)
    try:
        w = Witness.from_dict(req.witness.model_dump())
        value = witness_value(T, w)
    except (ValueError, TypeError) as e:
        raise _input_error(e)
    return {"claimed": w.value, "value": value, "consistent": abs(value - w.value) <= 1e-9}


@app.post("/api/bounds")
def bounds(req: BoundsRequest):
    try:
        return c_bounds(req.m, req.n).to_dict()
    except (ValueError, TypeError) as e:
        raise _input_error(e)


@app.post("/api/bounds/table")
def bounds_table_endpoint(req: TableRequest):
    try:
        rows = bounds_table(req.m_max, req.n_max)
    except ValueError as e:
        raise _input_error(e)
    return {"rows": [b.to_dict() for b in rows], "csv": table_to_csv(rows)}


@app.post("/api/verify")
def verify(req: VerifyRequest):
    map_obj = _parse_map(req.map) if req.map is not None else None
    try:
        cases = run_cases(
            req.selector,
            seeds=req.seeds,
            tol=req.tol,
            map_obj=map_obj,
            options=req.options.to_engine(),
        )
    except UnknownCaseError as e:
        raise _input_error(f"unknown case selector: {e.args[0]}")
    return {"cases": [c.to_dict() for c in cases], "all_pass": all(c.all_pass for c in cases)}


@app.post("/api/search")
def search(req: SearchRequest):
    skip = frozenset(int(s) for s in req.skip_shards)
    try:
        if req.class_tag == "perm":
            records = run_perm_search(
                req.m, req.n, options=req.options.to_engine(), cap=req.cap, skip_shards=skip
            )
        elif req.class_tag == "unitary":
            records = search_unitary(
                req.m,
                req.n,
                iters=req.iters,
                restarts=req.restarts,
                seed=req.seed,
                skip_shards=skip,
            )
        else:
            raise _input_error("class must be 'perm' or 'unitary'")
    except CapExceeded as e:
        raise HTTPException(
            status_code=400,
            detail={"kind": "cap", "message": str(e), "required": e.required},
        )
    except ValueError as e:
        raise _input_error(e)
    best = best_record(records)
    return {
        "records": [r.to_dict() for r in records],
        "best": best.to_dict() if best is not None else None,
    }


@app.post("/api/tensor")
def tensor_endpoint(req: TensorRequest):
    a = _parse_map(req.map_a)
    b = _parse_map(req.map_b)
    return {"map": map_to_dict(tensor(a, b))}


@app.get("/api/constructions/{name}")
def construction(name: str):
    try:
        c = by_name(name)
    except (KeyError, ValueError) as e:
        raise _input_error(e.args[0] if e.args else e)
    return {
        "name": c.name,
        "map": map_to_dict(c.map),
        "witnesses": [w.to_dict() for w in c.witnesses],
        "expected": {"hs": c.expected.hs, "op": c.expected.op, "cb": c.expected.cb},
    }
