"""
Job Files and Report Documents

A job file declares a ring, named ideals, elements and matrices, and
optionally the commands to run on them:

    # the example ideal
    ring { vars=[x,y]; center=[x,y]; field=Q; }
    ideal I = [x^2 + y^2, x*y, y^3]
    element w = x^2 + y^2
    matrix A = [[x, y], [y, -x]]
    run resolve
    run twist-check r=2 cap=10

``parse_job`` turns the text into a JobSpec (diagnostics carry line and
column). ``run_job`` executes one command and returns a ReportDocument with
the inputs echoed, the results, and one attestation per identity checked.
Command options are validated by one pydantic model per command.
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
import logging
import random
import re
from typing import Any, Callable

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    Json,
    NonNegativeInt,
    TypeAdapter,
    ValidationError,
)
from sympy import isprime

from app.dependencies.external.store.settings import settings

from .coeffring import RingSpec
from .errors import JobParseError, LocalResError, PreconditionError, ResourceCeilingError
from .hyperfac import (
    MatrixFactorization,
    assemble_block_mf,
    beyond_support_vanishes,
    ci_homotopies,
    ci_projection,
    ci_totalization,
    composites_vanish_mod,
    hypersurface_homotopies,
    leading_homotopies,
    quotient_exactness,
    relation_residual,
    relations_hold,
    standard_resolution_S,
    tail_matches,
    tail_periodic,
)
from .localdiv import division_holds, local_basis_preprocess, mora_divide
from .periodicity import (
    PeriodicityCertificate,
    PeriodicityInstance,
    batch_scan,
    brute_force_feasible,
    check_asymptotic_periodicity,
    instance_from_matrices,
    knorrer_double,
    knorrer_single,
    mf_extension_sum,
    random_instance,
    resolution_certificate,
    tighten_certificate,
    verify_certificate,
    xab_family,
)
from .poly import Poly, PolyMatrix, divides, format_poly, initial, parse_poly, terms
from .reescalc import (
    graded_complex_from_resolution,
    graded_truncate,
    proj_complex,
    sod_report,
)
from .resolution import (
    FreeResolution,
    columns_are_standard,
    composites_vanish,
    degree_compatible,
    euler_check,
    free_resolution,
    leading_complex,
    leading_consistency,
    twist_exactness_check,
)
from .stdbasis import (
    combinations_hold,
    generators_reduce,
    initial_terms,
    is_measure_basis,
    s_pairs_reduce,
    standard_basis,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


# ============================================================================
# Job Specification
# ============================================================================

@dataclass
class RunDirective:
    command: str
    options: dict[str, str]
    line: int


@dataclass
class JobSpec:
    spec: RingSpec
    ideals: dict[str, tuple[Poly, ...]] = field(default_factory=dict)
    elements: dict[str, Poly] = field(default_factory=dict)
    matrices: dict[str, PolyMatrix] = field(default_factory=dict)
    runs: list[RunDirective] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def where(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        column = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, column

    def error(self, message: str, pos: int | None = None) -> JobParseError:
        line, column = self.where(pos)
        return JobParseError(message, line=line, column=column)

    def skip(self, newlines: bool = True):
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "#":
                end = self.text.find("\n", self.pos)
                self.pos = len(self.text) if end < 0 else end
            elif ch in " \t\r" or (newlines and ch == "\n"):
                self.pos += 1
            else:
                break

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        self.skip()
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise self.error(f"expected '{ch}', found '{found}'")
        self.pos += 1

    def ident(self, what: str = "a name") -> str:
        self.skip()
        match = _IDENT.match(self.text, self.pos)
        if not match:
            raise self.error(f"expected {what}")
        self.pos = match.end()
        return match.group(0)

    def raw_until(self, stops: str, newlines: bool = True) -> tuple[str, int]:
        """Text up to a stop character outside parentheses; returns (text, start)."""
        self.skip(newlines)
        start = self.pos
        depth = 0
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif depth == 0 and ch in stops:
                break
            self.pos += 1
        return self.text[start:self.pos].strip(), start

    def bracket_list(self) -> list[tuple[str, int]]:
        self.expect("[")
        items = []
        while True:
            self.skip()
            if self.peek() == "]" and not items:
                self.pos += 1
                return items
            text, start = self.raw_until(",]")
            if not text:
                raise self.error("empty list entry", start)
            items.append((text, start))
            self.skip()
            if self.peek() == ",":
                self.pos += 1
                continue
            self.expect("]")
            return items


def _parse_ring(sc: _Scanner, warnings: list[str]) -> RingSpec:
    sc.expect("{")
    names: list[str] | None = None
    center: list[str] | None = None
    characteristic = 0
    while True:
        sc.skip()
        if sc.peek() == "}":
            sc.pos += 1
            break
        key_pos = sc.pos
        key = sc.ident("a ring setting")
        sc.expect("=")
        if key in ("vars", "center"):
            values = [text for text, _ in sc.bracket_list()]
            for v in values:
                if not _IDENT.fullmatch(v):
                    raise sc.error(f"'{v}' is not a variable name", key_pos)
            if key == "vars":
                names = values
            else:
                center = values
        elif key == "field":
            text, start = sc.raw_until(";}")
            characteristic = _parse_field(text, sc, start)
        else:
            raise sc.error(f"unknown ring setting '{key}'", key_pos)
        sc.skip()
        if sc.peek() == ";":
            sc.pos += 1
    if not names:
        raise sc.error("ring block needs vars=[...]")
    if len(set(names)) != len(names):
        raise sc.error("variable names must be distinct")
    if center is None:
        center = list(names)
    unknown = [v for v in center if v not in names]
    if unknown or not center:
        raise sc.error(f"center must be a nonempty subset of vars (unknown: {unknown})")
    if names[: len(center)] != center:
        rest = [v for v in names if v not in center]
        message = f"center {center} is not a prefix of vars; variables reordered to {center + rest}"
        logger.warning(message)
        warnings.append(message)
        names = center + rest
    try:
        return RingSpec(tuple(names), len(center), characteristic)
    except LocalResError as exc:
        raise sc.error(exc.message)


def _parse_field(text: str, sc: _Scanner, start: int) -> int:
    compact = text.replace(" ", "")
    if compact in ("Q", "QQ"):
        return 0
    match = re.fullmatch(r"Fp\(?(\d+)\)?", compact)
    if not match:
        raise sc.error(f"unknown field '{text}' (use Q or Fp <prime>)", start)
    p = int(match.group(1))
    if not isprime(p):
        raise sc.error(f"{p} is not prime", start)
    return p


def _poly_at(text: str, start: int, spec: RingSpec, sc: _Scanner) -> Poly:
    try:
        return parse_poly(text, spec)
    except ResourceCeilingError:
        raise
    except LocalResError as exc:
        raise sc.error(exc.message, start)


def parse_job(text: str) -> JobSpec:
    """Parse a job file; the ring block must come before any declaration."""
    sc = _Scanner(text)
    job: JobSpec | None = None
    warnings: list[str] = []
    declared: set[str] = set()

    def claim(name: str, pos: int):
        if name in declared:
            raise sc.error(f"duplicate name '{name}'", pos)
        declared.add(name)

    while not sc.at_end():
        start = sc.pos
        keyword = sc.ident("a statement keyword")
        if keyword == "ring":
            if job is not None:
                raise sc.error("ring declared twice", start)
            job = JobSpec(_parse_ring(sc, warnings), warnings=warnings)
            continue
        if job is None:
            raise sc.error("the ring block must come first", start)
        if keyword == "run":
            sc.skip(newlines=False)
            command = sc.ident("a command name")
            rest, rest_pos = sc.raw_until("#\n", newlines=False)
            options = {}
            for token in rest.split():
                if "=" not in token:
                    raise sc.error(f"option '{token}' must look like key=value", rest_pos)
                key, value = token.split("=", 1)
                options[key.replace("-", "_")] = value
            job.runs.append(RunDirective(command, options, sc.where(start)[0]))
            continue

        name_pos = sc.pos
        name = sc.ident()
        sc.expect("=")
        if keyword == "ideal":
            claim(name, name_pos)
            items = sc.bracket_list()
            if not items:
                raise sc.error(f"ideal '{name}' has no generators", name_pos)
            job.ideals[name] = tuple(_poly_at(t, p, job.spec, sc) for t, p in items)
        elif keyword == "element":
            claim(name, name_pos)
            text, pos = sc.raw_until("#;\n", newlines=False)
            if not text:
                raise sc.error(f"element '{name}' is empty", pos)
            job.elements[name] = _poly_at(text, pos, job.spec, sc)
        elif keyword == "matrix":
            claim(name, name_pos)
            sc.expect("[")
            rows = []
            while True:
                sc.skip()
                rows.append(sc.bracket_list())
                sc.skip()
                if sc.peek() == ",":
                    sc.pos += 1
                    continue
                sc.expect("]")
                break
            if len({len(r) for r in rows}) != 1 or not rows[0]:
                raise sc.error(f"matrix '{name}' must be a nonempty rectangle", name_pos)
            body = [[_poly_at(t, p, job.spec, sc) for t, p in row] for row in rows]
            job.matrices[name] = PolyMatrix.from_rows(job.spec, body)
        else:
            raise sc.error(f"unknown statement '{keyword}'", start)
        sc.skip()
        if sc.peek() == ";":
            sc.pos += 1
    if job is None:
        raise JobParseError("job file declares no ring", line=1, column=1)
    return job


# ============================================================================
# Command Options
# ============================================================================

class CommandOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")


class IdealOptions(CommandOptions):
    ideal: str | None = Field(default=None, description="Ideal name (default: first declared)")


class DivideOptions(IdealOptions):
    element: str | None = Field(default=None, description="Element to divide (default: first declared)")
    reduce_tail: bool = Field(default=True, description="Try to reduce every remainder term")


class StdOptions(IdealOptions):
    pass


class ResolveOptions(IdealOptions):
    reduce: bool = Field(default=False, description="Prune unit entries (drops homotopy data)")
    save: str | None = Field(default=None, description="Store name or .json path to save to")


class StoredOptions(IdealOptions):
    load: str | None = Field(default=None, description="Stored resolution to use instead of the ideal")


class LeadingOptions(StoredOptions):
    pass


class ProjOptions(StoredOptions):
    k: int = Field(default=0, ge=-50, le=50, description="Truncation threshold for the graded split")


class TwistOptions(StoredOptions):
    r: int = Field(default=0, ge=-10, le=30, description="Twist")
    cap: int = Field(default=10, ge=0, le=16, description="Largest P-degree checked")


class MatfacOptions(IdealOptions):
    element: str | None = Field(default=None, description="The hypersurface element w")
    k_prime: int | None = Field(
        default=None, ge=0, le=10, description="Deepest homotopy layer in the staircase, 2k' <= k"
    )
    depth_cap: int | None = Field(default=None, ge=0, le=10)


class StdResSOptions(MatfacOptions):
    length: int = Field(default=6, ge=1, le=24)
    r: int = Field(default=0, ge=-10, le=30)
    signed: bool = False
    cap: int = Field(default=6, ge=0, le=12, description="Degree cap of the graded exactness check")


class CiOptions(IdealOptions):
    w1: str | None = None
    w2: str | None = None
    depth_cap: int | None = Field(default=None, ge=0, le=10)
    length: int = Field(default=4, ge=1, le=16)
    cap: int = Field(default=8, ge=0, le=12)


class RawValuations(BaseModel):
    """Valuation matrices of a pair (A, B) and of w; null stands for infinity."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    a_val: list[list[NonNegativeInt | None]] = Field(alias="valA")
    b_val: list[list[NonNegativeInt | None]] = Field(alias="valB")
    d: int = Field(ge=1)


class PeriodicityOptions(CommandOptions):
    valuations: Json[RawValuations] | RawValuations | None = Field(
        default=None, description="Instance given as {\"valA\": ..., \"valB\": ..., \"d\": ...}"
    )
    a_matrix: str | None = Field(default=None, description="Declared matrix A")
    b_matrix: str | None = Field(default=None, description="Declared matrix B")
    element: str | None = Field(default=None, description="w for the declared pair")
    a: int | None = Field(default=None, ge=2, le=40, description="Exponent a of x^a + y^b")
    b: int | None = Field(default=None, ge=2, le=40, description="Exponent b of x^a + y^b")
    scan: bool = False
    a_max: int = Field(default=5, ge=2, le=12)
    b_max: int = Field(default=6, ge=2, le=12)
    brute: int = Field(default=0, ge=0, le=1000, description="Random instances compared with brute force")
    seed: int = 0
    bound: int = Field(default=10, ge=1, le=20)
    val_u: int = Field(default=1, ge=0, le=10, description="Valuation of the new variables")


class SodOptions(CommandOptions):
    n: int = Field(..., ge=1, le=64)
    c: int = Field(..., ge=1, le=64)
    d: int = Field(..., ge=1, le=64)


# ============================================================================
# Report Document
# ============================================================================

class Attestation(BaseModel):
    name: str
    passed: bool


class ReportDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schemaVersion")
    command: str
    inputs: dict[str, Any]
    results: dict[str, Any]
    attestations: list[Attestation]
    meta: dict[str, Any] | None = None

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.attestations)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, by_alias=True, exclude_none=True)


class ErrorBody(BaseModel):
    code: str
    message: str
    line: int | None = None
    column: int | None = None


class ErrorDocument(BaseModel):
    error: ErrorBody

    @classmethod
    def from_exception(cls, exc: LocalResError) -> "ErrorDocument":
        return cls(error=ErrorBody(
            code=exc.code,
            message=exc.message,
            line=exc.details.get("line"),
            column=exc.details.get("column"),
        ))

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, exclude_none=True)


_REPORT_LIST = TypeAdapter(list[ReportDocument])


def reports_to_json(reports: list[ReportDocument]) -> str:
    return _REPORT_LIST.dump_json(reports, indent=2, by_alias=True, exclude_none=True).decode()


@dataclass
class _Context:
    job: JobSpec | None
    oracle: bool
    store: Any
    inputs: dict[str, Any] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    attestations: list[Attestation] = field(default_factory=list)

    def attest(self, name: str, passed: bool):
        self.attestations.append(Attestation(name=name, passed=bool(passed)))

    @property
    def spec(self) -> RingSpec:
        if self.job is None:
            raise PreconditionError("this command needs a job file")
        return self.job.spec


# ============================================================================
# Encoding Helpers
# ============================================================================

def _p(f: Poly, spec: RingSpec) -> str:
    return format_poly(f, spec)


def _monomial(m, spec: RingSpec) -> str:
    return format_poly(spec.ring({m: spec.domain.one}), spec)


def _ring_echo(spec: RingSpec) -> dict:
    return {"vars": list(spec.names), "center": list(spec.center_names()), "field": spec.field_label}


def _steps(res: FreeResolution) -> list[dict]:
    return [
        {
            "matrix": step.matrix.to_strings(res.spec),
            "colMarks": list(step.col_marks),
            "rowMarks": list(step.row_marks),
        }
        for step in res.steps
    ]


def _certificate(cert: PeriodicityCertificate) -> dict:
    if cert.feasible:
        return {"feasible": True, "a": list(cert.a), "b": list(cert.b)}
    return {
        "feasible": False,
        "cycle": [{"from": e.source, "to": e.target, "weight": e.weight} for e in cert.cycle],
        "cycleWeight": cert.cycle_weight,
    }


def _instance(inst: PeriodicityInstance) -> dict:
    return {"aVal": [list(r) for r in inst.a_val], "bVal": [list(r) for r in inst.b_val], "d": inst.d}


def _pick(table: dict, name: str | None, what: str):
    if not table:
        raise JobParseError(f"the job declares no {what}")
    if name is None:
        return next(iter(table.items()))
    if name not in table:
        raise JobParseError(f"undeclared {what} '{name}'")
    return name, table[name]


def _ideal(ctx: _Context, name: str | None) -> tuple[Poly, ...]:
    label, gens = _pick(ctx.job.ideals if ctx.job else {}, name, "ideal")
    ctx.inputs["ideal"] = {"name": label, "generators": [_p(g, ctx.spec) for g in gens]}
    return gens


def _element(ctx: _Context, name: str | None, key: str = "element") -> Poly:
    label, f = _pick(ctx.job.elements if ctx.job else {}, name, "element")
    ctx.inputs[key] = {"name": label, "value": _p(f, ctx.spec)}
    return f


def _resolution(ctx: _Context, opts: IdealOptions) -> FreeResolution:
    load = getattr(opts, "load", None)
    if load is None:
        return free_resolution(_ideal(ctx, opts.ideal), ctx.spec)
    res = ctx.store.load(load)
    ctx.inputs["stored"] = {"name": load, "ring": _ring_echo(res.spec)}
    ctx.attest("stored_composites_vanish", composites_vanish(res))
    ctx.attest("stored_degree_compatible", degree_compatible(res))
    if not res.minimized:
        frames_ok = all(step.source_frame is not None for step in res.steps) and all(
            step.col_marks == step.source_frame.marks(res.spec) for step in res.steps
        )
        ctx.attest("stored_marks_match_frames", frames_ok)
    return res


# ============================================================================
# Commands
# ============================================================================

def _cmd_divide(ctx: _Context, opts: DivideOptions):
    spec = ctx.spec
    gens = _ideal(ctx, opts.ideal)
    f = _element(ctx, opts.element)
    result = mora_divide(f, gens, spec, reduce_tail=opts.reduce_tail)
    initials = [initial(g, spec)[1] for g in gens if g]
    ctx.results.update({
        "unit": _p(result.unit, spec),
        "quotients": [_p(q, spec) for q in result.quotients],
        "remainder": _p(result.remainder, spec),
        "reduced": result.reduced,
        "steps": result.steps,
    })
    ctx.attest("division_identity", division_holds(f, gens, result))
    lead_ok = not result.remainder or not any(
        divides(i, terms(result.remainder, spec)[0][0]) for i in initials
    )
    ctx.attest("remainder_initial_not_divisible", lead_ok)


def _cmd_std(ctx: _Context, opts: StdOptions):
    spec = ctx.spec
    gens = _ideal(ctx, opts.ideal)
    basis = standard_basis(gens, spec)
    local = local_basis_preprocess(gens, spec)
    ctx.results.update({
        "basis": [_p(g, spec) for g in basis.elements],
        "initials": [_monomial(m, spec) for _, m in initial_terms(basis)],
        "reduced": basis.reduced,
        "pairsTreated": basis.pairs_treated,
        "measureBasis": is_measure_basis(list(basis.elements), spec),
        "localBasis": {
            "elements": [_p(g, spec) for g in local.elements],
            "isLocalBasis": local.is_local_basis,
        },
    })
    ctx.attest("s_pairs_reduce_to_zero", s_pairs_reduce(basis))
    ctx.attest("generators_in_basis_ideal", generators_reduce(basis))
    ctx.attest("basis_combinations_hold", combinations_hold(basis))


def _resolution_attestations(ctx: _Context, res: FreeResolution, cap: int = 10):
    ctx.attest("composites_vanish", composites_vanish(res))
    ctx.attest("degree_compatible", degree_compatible(res))
    if not res.minimized:
        ctx.attest("columns_standard", columns_are_standard(res))
    if ctx.oracle and not res.minimized:
        euler = euler_check(res, cap)
        if euler is not None:
            ctx.attest("oracle_euler_characteristic", all(euler.values()))


def _cmd_resolve(ctx: _Context, opts: ResolveOptions):
    res = free_resolution(_ideal(ctx, opts.ideal), ctx.spec, reduce=opts.reduce)
    ctx.results.update({
        "ranks": list(res.ranks),
        "length": res.length,
        "minimized": res.minimized,
        "steps": _steps(res),
    })
    if opts.save:
        ctx.results["saved"] = str(ctx.store.save(opts.save, res))
    _resolution_attestations(ctx, res)


def _cmd_leading(ctx: _Context, opts: LeadingOptions):
    res = _resolution(ctx, opts)
    lead = leading_complex(res)
    same, other = leading_consistency(res)
    ctx.results.update({
        "ranks": list(lead.ranks),
        "steps": _steps(lead),
        "leadingFormRanks": list(other.ranks),
    })
    ctx.attest("leading_composites_vanish", composites_vanish(lead))
    ctx.attest("leading_matches_resolution_of_leading_forms", same)


def _cmd_twist(ctx: _Context, opts: TwistOptions):
    res = _resolution(ctx, opts)
    report = twist_exactness_check(res, opts.r, opts.cap, oracle=ctx.oracle)
    ctx.results.update({
        "r": report.r,
        "cap": report.cap,
        "ranks": list(res.ranks),
        "positions": [
            {
                "level": pos.level,
                "lifts": [
                    {"kind": c.kind, "success": c.success, "iterations": c.iterations}
                    for c in pos.lifts
                ],
                "gradedRanks": {str(d): list(v) for d, v in sorted(pos.ranks.items())},
                "exact": pos.exact,
            }
            for pos in report.positions
        ],
    })
    for pos in report.positions:
        ctx.attest(f"level_{pos.level}_twisted_exact", pos.exact)
    if report.oracle:
        ctx.results["oracle"] = report.oracle
        if report.oracle.get("applicable"):
            ctx.attest("oracle_rank_agreement", report.oracle["rank_agreement"])
            if report.oracle.get("euler") is not None:
                ctx.attest("oracle_euler_characteristic", report.oracle["euler"])


def _homotopy_listing(system, spec: RingSpec) -> list[dict]:
    return [
        {
            "index": list(alpha),
            "position": p,
            "matrix": matrix.to_strings(spec),
        }
        for (alpha, p), matrix in sorted(system.maps.items(), key=lambda kv: (sum(kv[0][0]), kv[0][0][::-1], kv[0][1]))
    ]


def _mf(mf: MatrixFactorization, spec: RingSpec) -> dict:
    return {
        "A": mf.A.to_strings(spec),
        "B": mf.B.to_strings(spec),
        "w": _p(mf.w, spec),
        "size": mf.size,
        "evenPositions": list(mf.even_positions),
        "oddPositions": list(mf.odd_positions),
    }


def _cmd_matfac(ctx: _Context, opts: MatfacOptions):
    spec = ctx.spec
    res = free_resolution(_ideal(ctx, opts.ideal), spec)
    w = _element(ctx, opts.element, "w")
    system = hypersurface_homotopies(res, w, opts.depth_cap)
    mf = assemble_block_mf(system, opts.k_prime)
    leading = leading_homotopies(system)
    ctx.results.update({
        "ranks": list(res.ranks),
        "homotopies": _homotopy_listing(system, spec),
        "matrixFactorization": _mf(mf, spec),
        "leadingHomotopies": _homotopy_listing(leading, spec),
    })
    ctx.attest("AB_equals_w_identity", mf.holds())
    ctx.attest("homotopy_relations", relations_hold(system))
    ctx.attest("vanishing_beyond_support", beyond_support_vanishes(system))
    ctx.attest("leading_homotopy_relations", relations_hold(leading))


def _total(total, spec: RingSpec) -> dict:
    return {
        "terms": [
            {
                "index": term.index,
                "summands": [
                    {
                        "position": s.position,
                        "beta": list(s.beta),
                        "marks": list(s.marks),
                        "twists": list(s.twists),
                    }
                    for s in term.summands
                ],
            }
            for term in total.terms
        ],
        "maps": [m.to_strings(spec) for m in total.maps],
        "tailStart": total.tail_start,
        "period": total.period,
        "signed": total.signed,
    }


def _exactness(ctx: _Context, total, cap: int, name: str):
    table = quotient_exactness(total, cap)
    if table is None:
        ctx.results["gradedExactness"] = None
        return
    ctx.results["gradedExactness"] = {
        str(i): {str(d): list(v) for d, v in rows.items()} for i, rows in table.items()
    }
    ctx.attest(name, all(k == m for rows in table.values() for k, m in rows.values()))


def _cmd_std_res_s(ctx: _Context, opts: StdResSOptions):
    spec = ctx.spec
    res = free_resolution(_ideal(ctx, opts.ideal), spec)
    w = _element(ctx, opts.element, "w")
    system = hypersurface_homotopies(res, w, opts.depth_cap)
    total = standard_resolution_S(system, opts.length, opts.r, signed=opts.signed)
    mf = assemble_block_mf(system, opts.k_prime)
    inst, cert = resolution_certificate(total, mf)
    ctx.results.update({
        "ranks": list(res.ranks),
        "resolution": _total(total, spec),
        "certificate": {"instance": _instance(inst), **_certificate(cert)},
    })
    ctx.attest("composites_vanish_mod_w", composites_vanish_mod(total))
    ctx.attest("tail_equals_block_factorization", tail_matches(total, mf))
    ctx.attest("tail_two_periodic", tail_periodic(total))
    ctx.attest("marks_certify_periodicity", verify_certificate(inst, cert))
    if ctx.oracle:
        _exactness(ctx, total, opts.cap, "oracle_graded_exactness")


def _cmd_ci(ctx: _Context, opts: CiOptions):
    spec = ctx.spec
    res = free_resolution(_ideal(ctx, opts.ideal), spec)
    w1 = _element(ctx, opts.w1, "w1")
    w2 = _element(ctx, opts.w2, "w2")
    system = ci_homotopies(res, w1, w2, opts.depth_cap)
    total = ci_totalization(system, opts.length)
    projection = assemble_block_mf(ci_projection(system, spec.ring.one, spec.ring.one))
    ctx.results.update({
        "ranks": list(res.ranks),
        "homotopies": _homotopy_listing(system, spec),
        "totalization": _total(total, spec),
        "projection": _mf(projection, spec),
    })
    ctx.attest("homotopy_relations", relations_hold(system))
    ctx.attest("connecting_relation", relation_residual(system, (1, 1), 0).is_zero())
    ctx.attest("composites_vanish_mod_w1_w2", composites_vanish_mod(total))
    ctx.attest("projection_factorizes_w1_plus_w2", projection.holds())
    _exactness(ctx, total, opts.cap, "graded_exactness")


def _transforms(ctx: _Context, label: str, inst: PeriodicityInstance, cert, mf, val_u: int) -> dict:
    tight = tighten_certificate(inst, cert)
    ctx.attest(f"{label}_tightened_verified", verify_certificate(inst, tight))
    double = knorrer_double(inst, cert, val_u, val_u)
    ctx.attest(f"{label}_double_verified", verify_certificate(double.instance, double.certificate))
    zeros = [[0] * inst.size for _ in range(inst.size)]
    none = [[None] * inst.size for _ in range(inst.size)]
    ext = mf_extension_sum(inst, cert, inst, cert, zeros, none)
    ctx.attest(f"{label}_extension_verified", verify_certificate(ext.instance, ext.certificate))
    out = {
        "tightened": _certificate(tight),
        "double": {
            "k": double.k,
            "interval": list(double.interval),
            "dPrime": double.d_prime,
            "shape": double.shape,
            **_certificate(double.certificate),
        },
        "extension": {"k0": ext.k0, "anyK": ext.any_k, **_certificate(ext.certificate)},
    }
    if inst.a_val == inst.b_val and (mf is None or mf.B == -mf.A):
        single = knorrer_single(inst, cert, val_u, mf)
        ctx.attest(f"{label}_single_verified", verify_certificate(single.instance, single.certificate))
        out["single"] = {
            "k": single.k,
            "interval": list(single.interval),
            "dPrime": single.d_prime,
            **_certificate(single.certificate),
        }
    return out


def _cmd_periodicity(ctx: _Context, opts: PeriodicityOptions):
    cases = []
    if opts.a_matrix or opts.b_matrix:
        spec = ctx.spec
        a_name, A = _pick(ctx.job.matrices, opts.a_matrix, "matrix")
        b_name, B = _pick(ctx.job.matrices, opts.b_matrix, "matrix")
        w = _element(ctx, opts.element, "w")
        mf = MatrixFactorization(A, B, w)
        ctx.inputs["pair"] = {"A": a_name, "B": b_name}
        ctx.attest("declared_pair_factorizes_w", mf.holds())
        cases.append(("declared", instance_from_matrices(A, B, w, spec), mf))
    if opts.valuations is not None:
        raw = opts.valuations
        inst = PeriodicityInstance.from_lists(raw.a_val, raw.b_val, raw.d)
        ctx.inputs["valuations"] = _instance(inst)
        cases.append(("raw", inst, None))
    if (opts.a is None) != (opts.b is None):
        raise PreconditionError("give both a and b for the x^a + y^b family")
    if opts.a is not None:
        spec = ctx.spec
        for label, perturbed in (("unperturbed", False), ("perturbed", True)):
            A, B, w = xab_family(opts.a, opts.b, spec, perturbed=perturbed)
            cases.append((label, instance_from_matrices(A, B, w, spec), MatrixFactorization(A, B, w)))

    instances = []
    for label, inst, mf in cases:
        cert = check_asymptotic_periodicity(inst)
        ctx.attest(f"{label}_certificate_verified", verify_certificate(inst, cert))
        entry = {"label": label, "instance": _instance(inst), **_certificate(cert)}
        if cert.feasible:
            entry["transforms"] = _transforms(ctx, label, inst, cert, mf, opts.val_u)
        instances.append(entry)
    ctx.results["instances"] = instances

    if opts.scan:
        rows = batch_scan(ctx.spec, range(2, opts.a_max + 1), range(2, opts.b_max + 1))
        ctx.results["scan"] = rows
        ctx.attest("scan_certificates_verified", all(
            row[k]["verified"] for row in rows for k in ("unperturbed", "perturbed")
        ))
    if opts.brute:
        rng = random.Random(opts.seed)
        disagreements = 0
        for _ in range(opts.brute):
            inst = random_instance(rng)
            if check_asymptotic_periodicity(inst).feasible != brute_force_feasible(inst, opts.bound):
                disagreements += 1
        ctx.results["bruteForce"] = {"instances": opts.brute, "seed": opts.seed, "disagreements": disagreements}
        ctx.attest("brute_force_agreement", disagreements == 0)
    if not cases and not opts.scan and not opts.brute:
        raise PreconditionError("periodicity needs a declared pair, valuations, a and b, scan or brute")


def _cmd_sod(ctx: _Context, opts: SodOptions):
    report = sod_report(opts.n, opts.c, opts.d)
    ctx.results.update({
        "gorensteinParameter": report.gorenstein_parameter,
        "applicable": report.applicable,
        "pieces": list(report.pieces),
        "pieceLabels": report.piece_labels,
        "residualLabel": report.residual_label,
    })
    ctx.attest("piece_count", len(report.pieces) == max(opts.c - opts.d - 1, 0))


def _cmd_proj(ctx: _Context, opts: ProjOptions):
    res = _resolution(ctx, opts)
    desc = proj_complex(res)
    split = graded_truncate(graded_complex_from_resolution(res), opts.k)
    ctx.results.update({
        "headTwist": desc.head_twist,
        "positions": [
            {
                "index": pos.index,
                "twists": [{"twist": t, "multiplicity": m} for t, m in pos.twists],
                "serreTwists": list(pos.serre_twists),
            }
            for pos in desc.positions
        ],
        "truncation": {"k": split.k, "floor": [list(p) for p in split.floor], "ceiling": [list(p) for p in split.ceiling]},
    })
    ctx.attest("twists_match_marks", all(
        sorted(t for t, m in pos.twists for _ in range(m)) == sorted(marks)
        for pos, marks in zip(desc.positions, desc.source_marks)
    ))
    ctx.attest("truncation_partitions", split.partitions(graded_complex_from_resolution(res)))


COMMANDS: dict[str, tuple[type[CommandOptions], Callable[[_Context, Any], None]]] = {
    "divide": (DivideOptions, _cmd_divide),
    "std": (StdOptions, _cmd_std),
    "resolve": (ResolveOptions, _cmd_resolve),
    "leading": (LeadingOptions, _cmd_leading),
    "twist-check": (TwistOptions, _cmd_twist),
    "matfac": (MatfacOptions, _cmd_matfac),
    "std-res-s": (StdResSOptions, _cmd_std_res_s),
    "ci-matfac": (CiOptions, _cmd_ci),
    "periodicity": (PeriodicityOptions, _cmd_periodicity),
    "sod": (SodOptions, _cmd_sod),
    "proj": (ProjOptions, _cmd_proj),
}

JOBLESS_COMMANDS = {"sod"}


def validate_options(command: str, options: dict[str, Any]) -> CommandOptions:
    if command not in COMMANDS:
        raise JobParseError(f"unknown command '{command}'")
    model = COMMANDS[command][0]
    try:
        return model.model_validate({k.replace("-", "_"): v for k, v in options.items()})
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise JobParseError(f"option {where}: {first['msg']}")


def run_job(
    job: JobSpec | None,
    command: str,
    overrides: dict[str, Any] | None = None,
    *,
    oracle: bool = False,
    meta: bool = False,
    store=None,
) -> ReportDocument:
    """
    Run ``command`` on the job. Options come from the job's first ``run``
    directive for that command, then ``overrides``.
    """
    options: dict[str, Any] = {}
    if job is not None:
        directive = next((d for d in job.runs if d.command == command), None)
        if directive is not None:
            options.update(directive.options)
    options.update(overrides or {})
    opts = validate_options(command, options)
    if job is None and command not in JOBLESS_COMMANDS:
        raise JobParseError(f"command '{command}' needs a job file")
    if store is None:
        from app.dependencies.external.store.store import ResolutionStore

        store = ResolutionStore()

    ctx = _Context(job, oracle, store)
    if job is not None:
        ctx.inputs["ring"] = _ring_echo(job.spec)
        if job.warnings:
            ctx.inputs["warnings"] = list(job.warnings)
    ctx.inputs["options"] = opts.model_dump(exclude_none=True)
    logger.info("running %s", command)
    COMMANDS[command][1](ctx, opts)

    meta_block = None
    if meta:
        meta_block = {
            "generatedAt": datetime.now(timezone.utc).isoformat(),
            "oracle": oracle,
            "stepCeiling": settings.step_ceiling,
        }
    return ReportDocument(
        command=command,
        inputs=ctx.inputs,
        results=ctx.results,
        attestations=ctx.attestations,
        meta=meta_block,
    )


def run_all(job: JobSpec, **kwargs) -> list[ReportDocument]:
    """Every ``run`` directive of the job, in file order."""
    if not job.runs:
        raise JobParseError("the job file has no run directives")
    reports = []
    for directive in job.runs:
        reports.append(run_job(job, directive.command, directive.options, **kwargs))
    return reports


__all__ = [
    "COMMANDS",
    "JOBLESS_COMMANDS",
    "Attestation",
    "CommandOptions",
    "ErrorDocument",
    "JobSpec",
    "ReportDocument",
    "RunDirective",
    "parse_job",
    "reports_to_json",
    "run_all",
    "run_job",
    "validate_options",
]
