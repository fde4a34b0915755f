"""Run drivers: benchmark tables, figure data series, point/sweep evaluation.

Every driver returns a list of :class:`ResultRow`; serialization to CSV,
JSON, or a fixed-width table is handled by :func:`render_rows`.  Output is
deterministic: identical inputs produce byte-identical CSV (floats at 9
significant digits, fixed column order given by the ResultRow field order).

Conventions:

* rows carry both the physical coordinates (lam, omega, mass, beta, temp)
  and, whenever mass = 1, the reduced coordinates (z, t_reduced) of the
  same point;
* ``f0``/``f2``/``f3``/``f4`` are cumulative partial sums of the
  variational series, not bare corrections;
* ``ref_*`` columns are published literature values quoted for
  comparison, never computed here;
* a row whose oracle call did not converge keeps the partial value,
  sets ``status`` to ``"degraded"``, and explains itself in ``note`` —
  silent NaNs are never emitted (every populated number is finite);
* CSV columns that no row populates are omitted entirely rather than
  emitted blank.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .core import ModelParams, RescaledParams, rescale, unrescale
from .diagrams import QuadratureSpec, quad_correction
from .errors import ConvergenceError, ValidationError
from .literature import TABLE1, TABLE1_Z, TABLE2
from .series import (
    VALID_ORDERS,
    c2_closed,
    c3_closed,
    c4_closed,
    series_eval,
)
from .spectrum import exact_free_energy

__all__ = [
    "ResultRow",
    "STATUS_DEGRADED",
    "STATUS_OK",
    "exit_code_for",
    "render_rows",
    "run_figure",
    "run_oracle_check",
    "run_point",
    "run_sweep",
    "run_table1",
    "run_table2",
]

STATUS_OK = "ok"
STATUS_DEGRADED = "degraded"

FIGURE_DEFAULT_RESOLUTION = {"fig1": 20, "fig2": 25, "fig3": 20}
FIGURE_Z_VALUES = (0.2, 1.0, 10.0, 30.0, 50.0)

# Default agreement tolerances (relative) for the closed-form vs quadrature
# cross-check, per correction order.
ORACLE_CHECK_TOL = {2: 1e-6, 3: 1e-6, 4: 1e-4}

SWEEP_VARIABLES = ("lam", "omega", "mass", "beta", "temp")

_FLOAT_FMT = ".9g"


@dataclass(frozen=True)
class ResultRow:
    """One output row; unset fields mean "not part of this run".

    Field order is the CSV column order.  Invariants enforced here: every
    populated numeric field is finite; when both coordinate forms are
    present they describe the same point under the reduced-variable map
    (which requires mass = 1); ``temp`` is the reciprocal of ``beta``.
    """

    lam: float | None = None
    omega: float | None = None
    mass: float | None = None
    beta: float | None = None
    temp: float | None = None
    z: float | None = None
    t_reduced: float | None = None
    order: int | None = None
    omega_big: float | None = None
    f0: float | None = None
    f2: float | None = None
    f3: float | None = None
    f4: float | None = None
    exact: float | None = None
    exact_step: float | None = None
    quad2: float | None = None
    quad3: float | None = None
    quad4: float | None = None
    closed: float | None = None
    quad: float | None = None
    rel_err: float | None = None
    ref_f0: float | None = None
    ref_f2: float | None = None
    ref_f3: float | None = None
    ref_f4: float | None = None
    ref_accu: float | None = None
    ref_exact: float | None = None
    ref_f1_cumulant: float | None = None
    ref_f3_cumulant: float | None = None
    status: str = STATUS_OK
    note: str | None = None

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                if not math.isfinite(v):
                    raise ValidationError(
                        f"row field {f.name} must be finite, got {v!r}"
                    )
        if self.beta is not None and self.temp is not None:
            if not math.isclose(self.temp, 1.0 / self.beta, rel_tol=1e-9):
                raise ValidationError(
                    f"temp {self.temp} inconsistent with beta {self.beta}"
                )
        if self.z is not None or self.t_reduced is not None:
            if None in (self.lam, self.omega, self.mass, self.beta,
                        self.z, self.t_reduced):
                raise ValidationError(
                    "reduced coordinates require the full physical quadruple"
                )
            if self.mass != 1.0:
                raise ValidationError(
                    "reduced coordinates are defined for mass = 1 only"
                )
            rp = rescale(ModelParams(self.mass, self.omega, self.lam, self.beta))
            same = math.isclose(self.z, rp.z, rel_tol=1e-9, abs_tol=1e-12) and \
                math.isclose(self.t_reduced, rp.t_reduced, rel_tol=1e-9)
            if not same:
                raise ValidationError(
                    "reduced and physical coordinates disagree: "
                    f"({self.z}, {self.t_reduced}) vs ({rp.z}, {rp.t_reduced})"
                )


def _coords(params: ModelParams) -> dict:
    out = {
        "lam": params.lam,
        "omega": params.omega,
        "mass": params.m,
        "beta": params.beta,
        "temp": params.temperature,
    }
    if params.m == 1.0:
        rp = rescale(params)
        out["z"] = rp.z
        out["t_reduced"] = rp.t_reduced
    return out


def _exact_fields(params: ModelParams, tol: float) -> dict:
    """Exact-diagonalization column plus its own convergence step size."""
    try:
        res = exact_free_energy(params, tol=tol, full_output=True)
        return {"exact": res.value, "exact_step": res.step}
    except ConvergenceError as exc:
        out = {"status": STATUS_DEGRADED, "note": f"exact oracle: {exc}"}
        if exc.value is not None and math.isfinite(exc.value):
            out["exact"] = float(exc.value)
            if exc.bound is not None and math.isfinite(exc.bound):
                out["exact_step"] = float(exc.bound)
        return out


def _merge_status(kw: dict, extra: dict) -> None:
    """Merge field updates, concatenating notes and keeping the worst status."""
    note = extra.pop("note", None)
    status = extra.pop("status", None)
    kw.update(extra)
    if status == STATUS_DEGRADED:
        kw["status"] = STATUS_DEGRADED
    if note:
        kw["note"] = f"{kw['note']}; {note}" if kw.get("note") else note


def _point_row(params: ModelParams, max_order: int, exact: bool, quad: bool,
               exact_tol: float, qspec: QuadratureSpec | None) -> ResultRow:
    if max_order not in VALID_ORDERS:
        raise ValidationError(
            f"max_order must be one of {VALID_ORDERS}, got {max_order}"
        )
    kw = _coords(params)
    try:
        fe = series_eval(params, max_order=max_order)
    except ConvergenceError as exc:
        _merge_status(kw, {"status": STATUS_DEGRADED,
                           "note": f"gap equation: {exc}"})
        return ResultRow(**kw)
    kw.update(omega_big=fe.omega_big, f0=fe.f0, f2=fe.f2, f3=fe.f3, f4=fe.f4)
    if exact:
        _merge_status(kw, _exact_fields(params, exact_tol))
    if quad:
        for order in (2, 3, 4):
            if order > max_order:
                break
            try:
                value = quad_correction(params, fe.omega_big, order, qspec=qspec)
                kw[f"quad{order}"] = value
            except ConvergenceError as exc:
                extra = {"status": STATUS_DEGRADED,
                         "note": f"order-{order} quadrature: {exc}"}
                if exc.value is not None and math.isfinite(exc.value):
                    extra[f"quad{order}"] = float(exc.value)
                _merge_status(kw, extra)
    return ResultRow(**kw)


def run_point(params: ModelParams | None = None,
              rescaled: RescaledParams | None = None, *,
              lam: float = 1.0, max_order: int = 4,
              exact: bool = False, quad: bool = False,
              exact_tol: float = 1e-9,
              qspec: QuadratureSpec | None = None) -> ResultRow:
    """Evaluate one parameter point, optionally with either oracle.

    Exactly one of ``params`` (physical) or ``rescaled`` (reduced; realized
    at coupling ``lam`` with mass 1) must be given.
    """
    if (params is None) == (rescaled is None):
        raise ValidationError("give exactly one of params or rescaled")
    if rescaled is not None:
        params = unrescale(rescaled, lam=lam)
    return _point_row(params, max_order, exact, quad, exact_tol, qspec)


def run_sweep(base: ModelParams, var: str, start: float, stop: float,
              points: int, *, max_order: int = 4, exact: bool = False,
              quad: bool = False, exact_tol: float = 1e-9,
              qspec: QuadratureSpec | None = None,
              log_spacing: bool = False) -> list[ResultRow]:
    """Sweep one physical variable over [start, stop] with the rest fixed."""
    if var not in SWEEP_VARIABLES:
        raise ValidationError(
            f"sweep variable must be one of {SWEEP_VARIABLES}, got {var!r}"
        )
    if points < 2:
        raise ValidationError(f"sweep needs at least 2 points, got {points}")
    if log_spacing:
        if start <= 0.0 or stop <= 0.0:
            raise ValidationError("log spacing requires positive endpoints")
        grid = np.geomspace(start, stop, points)
    else:
        grid = np.linspace(start, stop, points)
    rows = []
    for value in grid:
        value = float(value)
        if var == "temp":
            if value <= 0.0:
                raise ValidationError(f"temp must be positive, got {value}")
            p = replace(base, beta=1.0 / value)
        elif var == "mass":
            p = replace(base, m=value)
        else:
            p = replace(base, **{var: value})
        rows.append(_point_row(p, max_order, exact, quad, exact_tol, qspec))
    return rows


def run_table1(*, exact: bool = False, exact_tol: float = 1e-9) -> list[ResultRow]:
    """Strong-coupling benchmark scan at z = 10 against published values.

    One row per reduced temperature in {1, 2, 3, 4, 5, 10, 20, 30}, with the
    computed partial sums next to the published ``ref_*`` columns (including
    the independently published high-precision value ``ref_accu``).  With
    ``exact=True`` the diagonalization oracle is run per row as well.
    """
    rows = []
    for ref in TABLE1:
        params = unrescale(RescaledParams(TABLE1_Z, ref.t_reduced), lam=1.0)
        fe = series_eval(params, max_order=4)
        kw = _coords(params)
        kw.update(omega_big=fe.omega_big, f0=fe.f0, f2=fe.f2, f3=fe.f3,
                  f4=fe.f4, ref_f0=ref.f0.value, ref_f2=ref.f2.value,
                  ref_f3=ref.f3.value, ref_f4=ref.f4.value,
                  ref_accu=ref.f_accu.value)
        if exact:
            _merge_status(kw, _exact_fields(params, exact_tol))
        rows.append(ResultRow(**kw))
    return rows


def run_table2(*, exact: bool = False, exact_tol: float = 1e-9) -> list[ResultRow]:
    """Coupling/temperature benchmark scan at m = omega = 1.

    One row per published (lambda, beta) pair with the computed partial sums
    through third order.  The published exact values (``ref_exact``) and the
    published cumulant-expansion results (``ref_f1_cumulant``,
    ``ref_f3_cumulant``) are quoted as literature constants; with
    ``exact=True`` this package's own diagonalization value is added.
    """
    rows = []
    for ref in TABLE2:
        params = ModelParams(m=1.0, omega=1.0, lam=ref.lam, beta=ref.beta)
        fe = series_eval(params, max_order=3)
        kw = _coords(params)
        kw.update(omega_big=fe.omega_big, f0=fe.f0, f2=fe.f2, f3=fe.f3,
                  ref_f0=ref.f0.value, ref_f2=ref.f2.value,
                  ref_f3=ref.f3.value, ref_exact=ref.f_exact.value,
                  ref_f1_cumulant=ref.f1_cumulant.value,
                  ref_f3_cumulant=ref.f3_cumulant.value)
        if exact:
            _merge_status(kw, _exact_fields(params, exact_tol))
        rows.append(ResultRow(**kw))
    return rows


def run_figure(which: str, grid_resolution: int | None = None, *,
               exact_tol: float = 1e-9) -> list[ResultRow]:
    """Data series behind the three figures (numbers only, no rendering).

    * ``fig1``: temperature scan T in (0, 1] at lam = m = omega = 1;
      columns exact, f0, f2, f3, f4.  Shows the low-temperature behavior
      of the truncations against the exact value.
    * ``fig2``: reduced scan T in [1, 50] for z in {0.2, 1, 10, 30, 50};
      columns f0 and f4 only.  Shows the correction shrinking with z.
    * ``fig3``: pure-quartic limit z = 0 over a beta grid; columns f0,
      f2, f3, f4, exact.
    """
    if which not in FIGURE_DEFAULT_RESOLUTION:
        raise ValidationError(
            f"unknown figure {which!r}; expected one of "
            f"{tuple(FIGURE_DEFAULT_RESOLUTION)}"
        )
    n = FIGURE_DEFAULT_RESOLUTION[which] if grid_resolution is None else grid_resolution
    if n < 2:
        raise ValidationError(f"grid resolution must be >= 2, got {n}")

    rows = []
    if which == "fig1":
        for temp in np.linspace(0.05, 1.0, n):
            params = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=1.0 / float(temp))
            fe = series_eval(params, max_order=4)
            kw = _coords(params)
            kw.update(omega_big=fe.omega_big, f0=fe.f0, f2=fe.f2, f3=fe.f3,
                      f4=fe.f4)
            _merge_status(kw, _exact_fields(params, exact_tol))
            rows.append(ResultRow(**kw))
    elif which == "fig2":
        for z in FIGURE_Z_VALUES:
            for t_red in np.linspace(1.0, 50.0, n):
                params = unrescale(RescaledParams(z, float(t_red)), lam=1.0)
                fe = series_eval(params, max_order=4)
                kw = _coords(params)
                kw.update(omega_big=fe.omega_big, f0=fe.f0, f4=fe.f4)
                rows.append(ResultRow(**kw))
    else:
        for beta in np.geomspace(0.25, 20.0, n):
            params = ModelParams(m=1.0, omega=0.0, lam=1.0, beta=float(beta))
            fe = series_eval(params, max_order=4)
            kw = _coords(params)
            kw.update(omega_big=fe.omega_big, f0=fe.f0, f2=fe.f2, f3=fe.f3,
                      f4=fe.f4)
            _merge_status(kw, _exact_fields(params, exact_tol))
            rows.append(ResultRow(**kw))
    return rows


def run_oracle_check(params: ModelParams | None = None,
                     rescaled: RescaledParams | None = None, *,
                     lam: float = 1.0, max_order: int = 4,
                     tol: float | None = None,
                     qspec: QuadratureSpec | None = None) -> list[ResultRow]:
    """Compare each closed-form correction with its quadrature value.

    One row per order in {2, 3, 4} up to ``max_order``, carrying the
    closed-form value, the quadrature value, and their relative gap.  A gap
    above tolerance (or a non-converged quadrature) marks the row degraded.
    ``tol=None`` uses the per-order defaults in :data:`ORACLE_CHECK_TOL`;
    an explicit value applies to every order.
    """
    if (params is None) == (rescaled is None):
        raise ValidationError("give exactly one of params or rescaled")
    if rescaled is not None:
        params = unrescale(rescaled, lam=lam)
    if max_order not in VALID_ORDERS or max_order < 2:
        raise ValidationError(
            f"oracle check needs max_order in {{2, 3, 4}}, got {max_order}"
        )
    if tol is not None and tol <= 0.0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    fe = series_eval(params, max_order=0)
    closed_by_order = {2: c2_closed, 3: c3_closed, 4: c4_closed}
    rows = []
    for order in (2, 3, 4):
        if order > max_order:
            break
        closed = closed_by_order[order](params, fe.omega_big)
        kw = _coords(params)
        kw.update(order=order, omega_big=fe.omega_big, closed=closed)
        order_tol = ORACLE_CHECK_TOL[order] if tol is None else tol
        try:
            quad = quad_correction(params, fe.omega_big, order, qspec=qspec)
        except ConvergenceError as exc:
            extra = {"status": STATUS_DEGRADED,
                     "note": f"quadrature: {exc}"}
            if exc.value is not None and math.isfinite(exc.value):
                extra["quad"] = float(exc.value)
                extra["rel_err"] = abs(extra["quad"] - closed) / abs(closed)
            _merge_status(kw, extra)
            rows.append(ResultRow(**kw))
            continue
        rel_err = abs(quad - closed) / abs(closed)
        kw.update(quad=quad, rel_err=rel_err)
        if rel_err > order_tol:
            _merge_status(kw, {
                "status": STATUS_DEGRADED,
                "note": (f"order-{order} gap {rel_err:.3e} exceeds "
                         f"tolerance {order_tol:.3e}"),
            })
        rows.append(ResultRow(**kw))
    return rows


def _active_columns(rows: list[ResultRow]) -> list[str]:
    return [f.name for f in fields(ResultRow)
            if any(getattr(r, f.name) is not None for r in rows)]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, _FLOAT_FMT)
    return str(value)


def render_rows(rows: list[ResultRow], fmt: str = "csv") -> str:
    """Serialize rows as ``csv``, ``json``, or a fixed-width ``table``."""
    if fmt == "csv":
        return _render_csv(rows)
    if fmt == "json":
        return _render_json(rows)
    if fmt == "table":
        return _render_table(rows)
    raise ValidationError(
        f"format must be one of ('csv', 'json', 'table'), got {fmt!r}"
    )


def _render_csv(rows: list[ResultRow]) -> str:
    cols = _active_columns(rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_cell(getattr(r, c)) for c in cols])
    return buf.getvalue()


def _render_json(rows: list[ResultRow]) -> str:
    objs = []
    for r in rows:
        obj = {}
        for f in fields(ResultRow):
            v = getattr(r, f.name)
            if v is not None:
                obj[f.name] = v
        objs.append(obj)
    return json.dumps(objs, indent=2) + "\n"


def _render_table(rows: list[ResultRow]) -> str:
    cols = _active_columns(rows)
    cells = [[_cell(getattr(r, c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c)
              for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    for row in cells:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def exit_code_for(rows: list[ResultRow]) -> int:
    """0 when every row is clean, 2 when any row is degraded."""
    return 0 if all(r.status == STATUS_OK for r in rows) else 2
